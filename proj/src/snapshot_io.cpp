#include "subspace_glr/snapshot_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "subspace_glr/errors.hpp"

namespace subspace_glr {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'G', 'L', 'R', 'S', 'N', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

std::string describe(const std::filesystem::path& path) { return path.string(); }

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorKind::io, "cannot open " + describe(path));
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + describe(path));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& token, const std::string& where) {
  const std::string t = trim(token);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size())
    throw Error(ErrorKind::invalid_argument, where + ": '" + t + "' is not a number");
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32(std::ostream& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

float get_f32(const unsigned char* p) { return std::bit_cast<float>(get_u32(p)); }

CVector parse_vector(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw Error(ErrorKind::invalid_argument, field + ": expected a nonempty array of [re, im] pairs");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const std::string where = field + "[" + std::to_string(i) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw Error(ErrorKind::invalid_argument, where + ": expected [re, im]");
    v[static_cast<Eigen::Index>(i)] = cplx(e[0].get<double>(), e[1].get<double>());
  }
  return v;
}

nlohmann::json vector_json(const CVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

}  // namespace

SnapshotData read_snapshots_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(t);
    std::string tok;
    int col = 1;
    while (std::getline(ss, tok, ','))
      row.push_back(parse_number(tok, describe(path) + ":" + std::to_string(lineno) + ": column " +
                                          std::to_string(col++)));
    if (row.size() % 2 != 0)
      throw Error(ErrorKind::invalid_dimension, describe(path) + ":" + std::to_string(lineno) +
                                                    ": odd number of values; expected re,im pairs");
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(ErrorKind::invalid_dimension, describe(path) + ":" + std::to_string(lineno) + ": " +
                                                    std::to_string(row.size() / 2) + " snapshots, expected " +
                                                    std::to_string(rows.front().size() / 2));
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.size() % 2 != 0)
    throw Error(ErrorKind::invalid_dimension,
                describe(path) + ": expected 2L data rows, found " + std::to_string(rows.size()));

  const auto l = static_cast<Eigen::Index>(rows.size() / 2);
  const auto n = static_cast<Eigen::Index>(rows.front().size() / 2);
  SnapshotData data;
  data.y_s.resize(l, n);
  data.y_r.resize(l, n);
  for (Eigen::Index r = 0; r < 2 * l; ++r) {
    CMatrix& y = r < l ? data.y_s : data.y_r;
    const auto& row = rows[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < n; ++c)
      y(r % l, c) = cplx(row[static_cast<std::size_t>(2 * c)], row[static_cast<std::size_t>(2 * c + 1)]);
  }
  data.validate();
  return data;
}

void write_snapshots_csv(const SnapshotData& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream out = open_out(path);
  out << "# L=" << data.antennas() << " N=" << data.snapshots() << "; rows 1..L are Y_s, rows L+1..2L are Y_r\n";
  for (const CMatrix* y : {&data.y_s, &data.y_r}) {
    for (Eigen::Index r = 0; r < y->rows(); ++r) {
      for (Eigen::Index c = 0; c < y->cols(); ++c) {
        if (c) out << ',';
        out << format_double((*y)(r, c).real()) << ',' << format_double((*y)(r, c).imag());
      }
      out << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::io, "write failed for " + describe(path));
}

SnapshotData read_snapshots_binary(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, std::ios::binary);
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  constexpr std::size_t header = 8 + 4 * 4;
  if (bytes.size() < header || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
    throw Error(ErrorKind::invalid_argument, describe(path) + ": missing SGLRSNP1 header");
  const std::uint32_t version = get_u32(bytes.data() + 8);
  if (version != kVersion)
    throw Error(ErrorKind::invalid_argument, describe(path) + ": unsupported version " + std::to_string(version));
  const std::uint32_t l = get_u32(bytes.data() + 12);
  const std::uint32_t n = get_u32(bytes.data() + 16);
  if (l == 0 || n == 0) throw Error(ErrorKind::invalid_dimension, describe(path) + ": L and N must be positive");
  const std::uint64_t payload = 2ull * l * n * 8ull;
  if (bytes.size() != header + payload)
    throw Error(ErrorKind::invalid_dimension, describe(path) + ": size " + std::to_string(bytes.size()) +
                                                  " does not match L=" + std::to_string(l) +
                                                  ", N=" + std::to_string(n));
  SnapshotData data;
  data.y_s.resize(l, n);
  data.y_r.resize(l, n);
  const unsigned char* p = bytes.data() + header;
  for (CMatrix* y : {&data.y_s, &data.y_r})
    for (std::uint32_t r = 0; r < l; ++r)
      for (std::uint32_t c = 0; c < n; ++c, p += 8) (*y)(r, c) = cplx(get_f32(p), get_f32(p + 4));
  data.validate();
  return data;
}

void write_snapshots_binary(const SnapshotData& data, const std::filesystem::path& path) {
  data.validate();
  std::ofstream out = open_out(path, std::ios::binary);
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(data.antennas()));
  put_u32(out, static_cast<std::uint32_t>(data.snapshots()));
  put_u32(out, 0);
  for (const CMatrix* y : {&data.y_s, &data.y_r})
    for (Eigen::Index r = 0; r < y->rows(); ++r)
      for (Eigen::Index c = 0; c < y->cols(); ++c) {
        put_f32(out, (*y)(r, c).real());
        put_f32(out, (*y)(r, c).imag());
      }
  if (!out) throw Error(ErrorKind::io, "write failed for " + describe(path));
}

SnapshotData read_snapshots(const std::filesystem::path& path) {
  std::array<char, 8> head{};
  {
    std::ifstream in = open_in(path, std::ios::binary);
    in.read(head.data(), head.size());
    if (in.gcount() == static_cast<std::streamsize>(head.size()) && head == kMagic)
      return read_snapshots_binary(path);
  }
  return read_snapshots_csv(path);
}

SteeringPair parse_steering_json(const std::string& text, double tol) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::invalid_argument, std::string("steering: ") + e.what());
  }
  if (!j.is_object() || !j.contains("u_s") || !j.contains("u_r"))
    throw Error(ErrorKind::invalid_argument, "steering: expected an object with u_s and u_r");
  return SteeringPair::make(parse_vector(j["u_s"], "u_s"), parse_vector(j["u_r"], "u_r"), tol);
}

SteeringPair read_steering_json(const std::filesystem::path& path, double tol) {
  std::ifstream in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_steering_json(ss.str(), tol);
}

void write_steering_json(const SteeringPair& steering, const std::filesystem::path& path) {
  const nlohmann::json j = {{"u_s", vector_json(steering.u_s)}, {"u_r", vector_json(steering.u_r)}};
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed for " + describe(path));
}

}  // namespace subspace_glr
