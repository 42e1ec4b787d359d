#include "ksmix/output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace ksmix {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint64_t get_le(std::string_view b, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[pos + i])) << (8 * i);
  return v;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string records_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out = kCsvHeader;
  out += "\n";
  for (const auto& r : records) {
    const double row[] = {r.t,      r.mass,    r.l2_dev, r.h1,     r.h1_paper,          r.hm1,
                          r.linf_dev, r.min_val, r.pn_low, r.criterion_integral, r.dt_used};
    for (std::size_t i = 0; i < std::size(row); ++i) {
      if (i) out += ",";
      out += format_real(row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string encode_snapshot(const ScalarField& f, double time) {
  const Grid& g = f.grid();
  std::string out = "KSMX";
  out.reserve(32 + 8 * g.size());
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(g.dim));
  put_u32(out, static_cast<std::uint32_t>(g.n));
  put_f64(out, time);
  put_f64(out, f.mean());
  for (double v : f.values()) put_f64(out, v);
  return out;
}

SnapshotData decode_snapshot(std::string_view b) {
  if (b.size() < 32 || b.substr(0, 4) != "KSMX") throw IoError("not a snapshot: bad magic");
  const auto version = get_le(b, 4, 4);
  if (version != 1) throw IoError("unsupported snapshot version " + std::to_string(version));
  const int dim = static_cast<int>(get_le(b, 8, 4));
  const int n = static_cast<int>(get_le(b, 12, 4));
  Grid g;
  try {
    g = make_grid(dim, n);
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("snapshot header: ") + e.what());
  }
  if (b.size() != 32 + 8 * g.size()) throw IoError("snapshot payload has the wrong length");
  const double time = std::bit_cast<double>(get_le(b, 16, 8));
  const double mean = std::bit_cast<double>(get_le(b, 24, 8));
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::bit_cast<double>(get_le(b, 32 + 8 * i, 8));
  return SnapshotData{ScalarField(g, std::move(v)), time, mean};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading: " + std::strerror(errno));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_snapshot(const std::filesystem::path& path, const ScalarField& f, double time) {
  write_bytes(path, encode_snapshot(f, time));
}

SnapshotData read_snapshot(const std::filesystem::path& path) { return decode_snapshot(read_file(path)); }

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string verdict_line(const Verdict& v) {
  return std::string(v.pass ? "PASS " : "FAIL ") + v.name + ": " + v.detail;
}

void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  std::vector<const OutputFile*> sorted;
  for (const auto& f : files) {
    if (f.name == kManifestName) throw IoError("output name collides with the manifest");
    sorted.push_back(&f);
  }
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });
  std::string manifest;
  for (const auto* f : sorted) {
    write_bytes(dir / f->name, f->bytes);
    manifest += sha256_hex(f->bytes) + "  " + f->name + "\n";
  }
  write_bytes(dir / kManifestName, manifest);
}

void write_outputs(const std::filesystem::path& dir, const std::vector<DiagnosticsRecord>& records,
                   const std::vector<std::pair<std::string, SnapshotData>>& snapshots) {
  std::vector<OutputFile> files{{"series.csv", records_csv(records)}};
  for (const auto& [name, s] : snapshots) files.push_back({name, encode_snapshot(s.field, s.time)});
  write_outputs(dir, files);
}

}  // namespace ksmix
