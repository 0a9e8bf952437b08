#include "subsel/instance_io.hpp"

#include "subsel/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

namespace subsel {

using nlohmann::json;

namespace {

Rational entry(const json& value, const std::string& where) {
  if (value.is_string()) {
    try {
      return parseRational(value.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  if (value.is_number_integer()) return Rational(value.get<long long>());
  throw InputError(where + ": expected a rational string or an integer");
}

RatVector column(const json& value, const std::string& where) {
  if (!value.is_array()) throw InputError(where + ": expected an array");
  RatVector v(static_cast<Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i)
    v[static_cast<Index>(i)] = entry(value[i], where + "[" + std::to_string(i) + "]");
  return v;
}

RatMatrix matrix(const json& value, const std::string& where) {
  if (!value.is_array()) throw InputError(where + ": expected a list of rows");
  const std::size_t rows = value.size();
  const std::size_t cols = rows ? (value[0].is_array() ? value[0].size() : 0) : 0;
  RatMatrix M(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rowWhere = where + "[" + std::to_string(r) + "]";
    if (!value[r].is_array() || value[r].size() != cols)
      throw InputError(rowWhere + ": rows must be arrays of equal length");
    for (std::size_t c = 0; c < cols; ++c)
      M(static_cast<Index>(r), static_cast<Index>(c)) =
          entry(value[r][c], rowWhere + "[" + std::to_string(c) + "]");
  }
  return M;
}

json text(const Rational& value) { return toString(value); }

json columnJson(const RatVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(text(v[i]));
  return out;
}

}  // namespace

Instance parseInstance(const std::string& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("instance must be a JSON object");
  for (const char* field : {"blocks", "b", "sigma"})
    if (!doc.contains(field)) throw InputError(std::string("missing field '") + field + "'");
  for (const auto& [key, value] : doc.items())
    if (key != "blocks" && key != "coupling" && key != "intercept" && key != "b" && key != "sigma")
      throw InputError("unknown field '" + key + "'");

  Instance instance;
  if (!doc["blocks"].is_array()) throw InputError("blocks: expected a list of matrices");
  for (std::size_t i = 0; i < doc["blocks"].size(); ++i)
    instance.blocks.push_back(matrix(doc["blocks"][i], "blocks[" + std::to_string(i) + "]"));
  if (doc.contains("coupling")) {
    if (!doc["coupling"].is_array()) throw InputError("coupling: expected a list of columns");
    for (std::size_t l = 0; l < doc["coupling"].size(); ++l)
      instance.coupling.push_back(column(doc["coupling"][l], "coupling[" + std::to_string(l) + "]"));
  }
  if (doc.contains("intercept") && !doc["intercept"].is_null())
    instance.intercept = column(doc["intercept"], "intercept");
  instance.b = column(doc["b"], "b");
  if (!doc["sigma"].is_number_integer()) throw InputError("sigma: expected an integer");
  const auto sigma = doc["sigma"].get<long long>();
  if (sigma < 0 || sigma > 1000000) throw InputError("sigma is negative or absurdly large");
  instance.sigma = static_cast<int>(sigma);

  if (const auto violations = validate(instance); !violations.empty()) throw InputError(violations.front());
  return instance;
}

Instance readInstance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parseInstance(buffer.str());
}

std::string writeInstance(const Instance& instance) {
  json doc;
  doc["blocks"] = json::array();
  for (const auto& block : instance.blocks) {
    json rows = json::array();
    for (Index r = 0; r < block.rows(); ++r) rows.push_back(columnJson(block.row(r).transpose()));
    doc["blocks"].push_back(std::move(rows));
  }
  doc["coupling"] = json::array();
  for (const auto& c : instance.coupling) doc["coupling"].push_back(columnJson(c));
  if (instance.intercept) doc["intercept"] = columnJson(*instance.intercept);
  doc["b"] = columnJson(instance.b);
  doc["sigma"] = instance.sigma;
  return doc.dump() + "\n";
}

namespace {

// Modulo draws keep the stream identical across standard libraries; the bias
// is irrelevant for test data.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  int between(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin() { return (rng_() & 1u) != 0; }
  Rational entry(int range) {
    const int p = between(-range, range);
    const int q = between(1, range);
    return Rational(p, q);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

Instance generateInstance(const GeneratorOptions& options) {
  if (options.blocks < 1) throw InputError("--blocks must be at least 1");
  if (options.blockCols < 1) throw InputError("--block-cols must be at least 1");
  if (options.blockRows < 1) throw InputError("--block-rows must be at least 1");
  if (options.coupling < 0) throw InputError("--coupling must be non-negative");
  if (options.range < 1) throw InputError("--range must be at least 1");

  Draw draw(options.seed);
  Instance instance;
  Index m = 0;
  for (int i = 0; i < options.blocks; ++i) {
    const int rows = draw.between(1, options.blockRows);
    const int cols = draw.between(1, options.blockCols);
    RatMatrix block(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) block(r, c) = draw.entry(options.range);
    instance.blocks.push_back(std::move(block));
    m += rows;
  }
  auto randomColumn = [&] {
    RatVector v(m);
    for (Index r = 0; r < m; ++r) v[r] = draw.entry(options.range);
    return v;
  };
  for (int l = 0; l < options.coupling; ++l) instance.coupling.push_back(randomColumn());
  if (options.intercept) instance.intercept = randomColumn();
  instance.b = randomColumn();
  const int d = static_cast<int>(instance.variableCount());
  if (options.sigma) {
    if (*options.sigma < 0 || *options.sigma > d)
      throw InputError("--sigma must lie in 0.." + std::to_string(d) + " for this instance");
    instance.sigma = *options.sigma;
  } else {
    instance.sigma = draw.between(0, d);
  }
  return instance;
}

}  // namespace subsel
