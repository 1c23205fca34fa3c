#include "fbmpersist/batch_io.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "fbmpersist/errors.hpp"

namespace fbmpersist {

namespace {

constexpr char kMagic[8] = {'F', 'B', 'M', 'P', 'B', 'A', 'T', '1'};

static_assert(std::endian::native == std::endian::little, "binary batch format assumes little-endian");

}  // namespace

std::string points_digest(const std::vector<Point>& points) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& p : points) feed(p.coords.data(), p.coords.size() * sizeof(double));
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

nlohmann::json batch_header(const SampleBatch& batch) {
  nlohmann::json h;
  h["model"] = {{"kind", to_string(batch.model.kind())},
                {"H", batch.model.hurst()},
                {"sigma", batch.model.sigma()},
                {"ell", batch.model.ell()}};
  h["points_digest"] = points_digest(batch.points);
  h["n_points"] = batch.points.size();
  h["dim"] = batch.points.empty() ? 0 : batch.points.front().dim();
  h["seed"] = batch.master_seed;
  h["first_index"] = batch.first_index;
  h["count"] = batch.count();
  return h;
}

void write_batch_csv(std::ostream& os, const SampleBatch& batch) {
  const auto h = batch_header(batch);
  for (const auto& [key, value] : h.items()) os << "# " << key << "=" << value.dump() << '\n';
  const auto n = batch.points.size();
  for (std::size_t j = 0; j < n; ++j) os << (j ? "," : "") << "p" << j;
  os << '\n';
  os.precision(17);
  for (Eigen::Index r = 0; r < batch.values.rows(); ++r) {
    for (Eigen::Index j = 0; j < batch.values.cols(); ++j) os << (j ? "," : "") << batch.values(r, j);
    os << '\n';
  }
}

void write_batch_binary(std::ostream& os, const SampleBatch& batch) {
  auto h = batch_header(batch);
  auto& pts = h["points"] = nlohmann::json::array();
  for (const auto& p : batch.points) pts.push_back(p.coords);
  const std::string text = h.dump();
  const std::uint64_t len = text.size();
  os.write(kMagic, sizeof kMagic);
  os.write(reinterpret_cast<const char*>(&len), sizeof len);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  os.write(reinterpret_cast<const char*>(batch.values.data()),
           static_cast<std::streamsize>(batch.values.size() * sizeof(double)));
}

SampleBatch read_batch_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw ConfigError("not a batch file (bad magic)");
  std::uint64_t len = 0;
  if (!is.read(reinterpret_cast<char*>(&len), sizeof len)) throw ConfigError("truncated batch header");
  std::string text(len, '\0');
  if (!is.read(text.data(), static_cast<std::streamsize>(len))) throw ConfigError("truncated batch header");
  const auto h = nlohmann::json::parse(text);

  SampleBatch b;
  const auto& m = h.at("model");
  const auto kind = model_kind_from_string(m.at("kind").get<std::string>());
  b.model = kind == ModelKind::Fbm
                ? CovarianceModel::fbm(m.at("H").get<double>())
                : CovarianceModel::perturbed_fbm(m.at("H").get<double>(), m.at("sigma").get<double>(),
                                                 m.at("ell").get<double>());
  for (const auto& p : h.at("points")) b.points.push_back(Point{p.get<std::vector<double>>()});
  if (points_digest(b.points) != h.at("points_digest").get<std::string>())
    throw ConfigError("batch points digest mismatch");
  b.master_seed = h.at("seed").get<std::uint64_t>();
  b.first_index = h.at("first_index").get<std::size_t>();
  const auto count = h.at("count").get<Eigen::Index>();
  b.values.resize(count, static_cast<Eigen::Index>(b.points.size()));
  if (!is.read(reinterpret_cast<char*>(b.values.data()),
               static_cast<std::streamsize>(b.values.size() * sizeof(double))))
    throw ConfigError("truncated batch values");
  return b;
}

}  // namespace fbmpersist
