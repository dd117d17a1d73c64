#include "bihartree/checkpoint.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

namespace bihartree {

namespace {

using json = nlohmann::json;

std::string encode(const ComplexField& u) {
  std::string bytes(u.size() * 16, '\0');
  auto put = [&](std::size_t offset, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    std::memcpy(bytes.data() + offset, &bits, 8);
  };
  for (std::size_t i = 0; i < u.size(); ++i) {
    put(16 * i, u[i].real());
    put(16 * i + 8, u[i].imag());
  }
  return bytes;
}

double take(const std::string& bytes, std::size_t offset) {
  std::uint64_t bits;
  std::memcpy(&bits, bytes.data() + offset, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

}  // namespace

std::string payload_sha256(const ComplexField& u) { return sha256_hex(encode(u)); }

void write_checkpoint(const std::string& path, const ComplexField& u, double t, const ModelParams& params) {
  const auto payload = encode(u);
  const auto& g = u.grid();
  json header = {{"format_version", kCheckpointVersion},
                 {"d", g.dim()},
                 {"M", g.points()},
                 {"L", g.length()},
                 {"t", t},
                 {"params", {{"N", params.N}, {"alpha", params.alpha}, {"b", params.b}, {"p", params.p}}},
                 {"sha256", sha256_hex(payload)}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out << header.dump() << '\n';
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("write failed for checkpoint '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path, GridPtr grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("checkpoint '" + path + "' has no header");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError("checkpoint '" + path + "': malformed header (" + e.what() + ")");
  }
  try {
    const int version = header.at("format_version").get<int>();
    if (version != kCheckpointVersion)
      throw VersionError("checkpoint '" + path + "': unsupported format_version " + std::to_string(version));
    const int d = header.at("d").get<int>();
    const int M = header.at("M").get<int>();
    const double L = header.at("L").get<double>();
    if (grid) {
      if (grid->dim() != d || grid->points() != M || grid->length() != L)
        throw IoError("checkpoint '" + path + "' does not match the requested grid");
    } else {
      grid = make_grid(d, L, M);
    }
    const std::string payload(std::istreambuf_iterator<char>(in), {});
    const std::string expected = header.at("sha256").get<std::string>();
    if (payload.size() != grid->size() * 16)
      throw ChecksumError("checkpoint '" + path + "': payload is " + std::to_string(payload.size()) +
                          " bytes, expected " + std::to_string(grid->size() * 16));
    const auto actual = sha256_hex(payload);
    if (actual != expected) throw ChecksumError("checkpoint '" + path + "': checksum mismatch");
    ComplexField field(grid);
    for (std::size_t i = 0; i < field.size(); ++i) field[i] = cplx(take(payload, 16 * i), take(payload, 16 * i + 8));
    const auto& p = header.at("params");
    ModelParams params{p.at("N").get<int>(), p.at("alpha").get<double>(), p.at("b").get<double>(),
                       p.at("p").get<double>()};
    return {std::move(field), header.at("t").get<double>(), params, actual};
  } catch (const json::exception& e) {
    throw IoError("checkpoint '" + path + "': header field error (" + e.what() + ")");
  }
}

}  // namespace bihartree
