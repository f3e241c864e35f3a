#include "vda/dsp/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vda::dsp {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}
std::uint32_t get_u32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t get_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

std::int16_t quantize(double x) {
  const double c = std::clamp(x, -1.0, 1.0);
  return static_cast<std::int16_t>(std::lround(c * 32767.0));
}

}  // namespace

void write_wav_multichannel(const std::string& path, const std::vector<Signal>& channels) {
  if (channels.empty()) throw std::invalid_argument("write_wav: no channels");
  const std::size_t n = channels[0].size();
  const int rate = channels[0].sample_rate;
  for (const auto& c : channels)
    if (c.size() != n || c.sample_rate != rate)
      throw std::invalid_argument("write_wav: channels differ in length or sample rate");
  const auto nch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(n * nch * 2);

  std::string buf;
  buf.reserve(44 + data_bytes);
  buf += "RIFF";
  put_u32(buf, 36 + data_bytes);
  buf += "WAVEfmt ";
  put_u32(buf, 16);
  put_u16(buf, 1);
  put_u16(buf, nch);
  put_u32(buf, static_cast<std::uint32_t>(rate));
  put_u32(buf, static_cast<std::uint32_t>(rate) * nch * 2);
  put_u16(buf, static_cast<std::uint16_t>(nch * 2));
  put_u16(buf, 16);
  buf += "data";
  put_u32(buf, data_bytes);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& c : channels) put_u16(buf, static_cast<std::uint16_t>(quantize(c.samples[i])));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

void write_wav(const std::string& path, const Signal& s) { write_wav_multichannel(path, {s}); }

void write_component_wav(const std::string& path, const ComponentSet& cs) {
  std::vector<Signal> ch;
  ch.reserve(cs.C() + 1);
  ch.push_back(cs.original);
  for (const auto& c : cs.components) ch.push_back(c);
  write_wav_multichannel(path, ch);
}

std::vector<Signal> read_wav_channels(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<unsigned char> b((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("'" + path + "' is not a RIFF/WAVE file");

  std::uint16_t fmt_tag = 0, nch = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::uint32_t len = get_u32(&b[pos + 4]);
    const unsigned char* body = &b[pos + 8];
    if (pos + 8 + len > b.size()) throw std::runtime_error("'" + path + "': truncated chunk");
    if (std::memcmp(&b[pos], "fmt ", 4) == 0 && len >= 16) {
      fmt_tag = get_u16(body);
      nch = get_u16(body + 2);
      rate = get_u32(body + 4);
      bits = get_u16(body + 14);
    } else if (std::memcmp(&b[pos], "data", 4) == 0) {
      data = body;
      data_len = len;
    }
    pos += 8 + len + (len & 1);
  }
  if (fmt_tag != 1 || bits != 16 || nch == 0)
    throw std::runtime_error("'" + path + "': only PCM16 WAV is supported");
  if (!data) throw std::runtime_error("'" + path + "': missing data chunk");

  const std::size_t frames = data_len / (2u * nch);
  std::vector<Signal> out(nch);
  for (auto& s : out) {
    s.sample_rate = static_cast<int>(rate);
    s.samples.resize(frames);
  }
  for (std::size_t i = 0; i < frames; ++i)
    for (std::size_t c = 0; c < nch; ++c) {
      const auto v = static_cast<std::int16_t>(get_u16(data + 2 * (i * nch + c)));
      out[c].samples[i] = v / 32767.0;
    }
  return out;
}

Signal read_wav(const std::string& path) {
  auto ch = read_wav_channels(path);
  if (ch.size() != 1) throw std::runtime_error("'" + path + "': expected a mono WAV");
  return std::move(ch[0]);
}

}  // namespace vda::dsp
