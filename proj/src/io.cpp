#include "macrostate/io.hpp"

#include "macrostate/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace macrostate {

namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

double require_double(std::string_view s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  if (!parse_double(s, v))
    throw Error(ErrorCode::IoError, path.string() + ":" + std::to_string(line) + ": '" + std::string(s) +
                                        "' is not a number");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <typename T>
std::vector<T> json_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    throw Error(ErrorCode::IoError, std::string("grid header needs an array '") + key + "'");
  return j[key].get<std::vector<T>>();
}

}  // namespace

DensityGrid read_density_grid(const fs::path& path) {
  Json header;
  try {
    auto in = open_in(path);
    header = Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::IoError, "invalid grid JSON '" + path.string() + "': " + e.what());
  }
  DensityGrid grid;
  grid.shape.dims = json_array<Index>(header, "dims");
  grid.shape.spacing = header.contains("spacing") ? json_array<double>(header, "spacing")
                                                  : std::vector<double>(grid.shape.dims.size(), 1.0);
  grid.shape.origin = header.contains("origin") ? json_array<double>(header, "origin")
                                                : std::vector<double>(grid.shape.dims.size(), 0.0);
  grid.shape.validate();

  std::vector<double> values;
  if (header.contains("values")) {
    values = header["values"].get<std::vector<double>>();
  } else {
    fs::path file = path;
    file.replace_extension(".csv");
    if (header.contains("values_file")) file = path.parent_path() / header["values_file"].get<std::string>();
    auto in = open_in(file);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      for (const auto& field : split_csv_line(line)) {
        if (field.empty()) continue;
        double v = 0.0;
        if (!parse_double(field, v)) {
          if (lineno == 1) break;  // header row
          require_double(field, file, lineno);
        }
        values.push_back(v);
      }
    }
  }
  if (static_cast<Index>(values.size()) != grid.shape.size())
    throw Error(ErrorCode::IoError, "grid has " + std::to_string(values.size()) + " values, dims need " +
                                        std::to_string(grid.shape.size()));
  grid.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
  grid.validate();
  return grid;
}

void write_density_grid(const fs::path& path, const DensityGrid& grid) {
  Json j;
  j["dims"] = grid.shape.dims;
  j["spacing"] = grid.shape.spacing;
  j["origin"] = grid.shape.origin;
  j["values"] = std::vector<double>(grid.values.data(), grid.values.data() + grid.values.size());
  write_json(path, j);
}

ItemSet read_items_csv(const fs::path& path, bool id_column, double round_step) {
  if (round_step < 0.0) throw Error(ErrorCode::InvalidArgument, "round step must be nonnegative");
  auto in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> ids;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    const std::size_t skip = id_column ? 1 : 0;
    if (fields.size() <= skip) throw Error(ErrorCode::IoError, path.string() + ": row without numeric columns");
    std::vector<double> row;
    bool numeric = true;
    for (std::size_t c = skip; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) numeric = false;
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && ids.empty() && lineno == 1) continue;  // header
      for (std::size_t c = skip; c < fields.size(); ++c) require_double(fields[c], path, lineno);
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw Error(ErrorCode::IoError, path.string() + ":" + std::to_string(lineno) + ": expected " +
                                          std::to_string(width) + " columns");
    if (round_step > 0.0)
      for (double& v : row) v = std::round(v / round_step) * round_step + 0.0;
    rows.push_back(std::move(row));
    ids.push_back(id_column ? fields[0] : std::to_string(rows.size() - 1));
  }
  if (round_step > 0.0) {
    std::map<std::vector<double>, std::size_t> seen;
    std::vector<std::vector<double>> kept;
    std::vector<std::string> kept_ids;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!seen.emplace(rows[i], i).second) continue;
      kept.push_back(rows[i]);
      kept_ids.push_back(ids[i]);
    }
    rows = std::move(kept);
    ids = std::move(kept_ids);
  }
  ItemSet set;
  set.items.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < width; ++c) set.items(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
  set.ids = std::move(ids);
  set.validate();
  return set;
}

GraphSpec read_graph_tsv(const fs::path& path, bool directed) {
  auto in = open_in(path);
  GraphSpec g;
  g.directed = directed;
  std::string line;
  std::size_t lineno = 0;
  Index max_id = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::vector<std::string> fields;
    for (std::string f; ss >> f;) fields.push_back(f);
    if (fields.empty()) continue;
    if (fields.size() < 2 || fields.size() > 3)
      throw Error(ErrorCode::IoError, path.string() + ":" + std::to_string(lineno) + ": expected 'src dst [weight]'");
    Edge e;
    Index ids[2];
    for (int k = 0; k < 2; ++k) {
      const auto& f = fields[static_cast<std::size_t>(k)];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), ids[k]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() || ids[k] < 0)
        throw Error(ErrorCode::IoError, path.string() + ":" + std::to_string(lineno) + ": bad node id '" + f + "'");
    }
    e.src = ids[0];
    e.dst = ids[1];
    e.weight = fields.size() == 3 ? require_double(fields[2], path, lineno) : 1.0;
    max_id = std::max({max_id, e.src, e.dst});
    g.edges.push_back(e);
  }
  g.n_nodes = max_id + 1;
  g.validate();
  return g;
}

CsvTable read_csv(const fs::path& path) {
  auto in = open_in(path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.rows.push_back(std::move(fields));
    }
  }
  if (first) throw Error(ErrorCode::IoError, "'" + path.string() + "' is empty");
  return t;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  auto out = open_out(path);
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_field(row[c]);
    out << '\n';
  };
  emit(table.header);
  for (const auto& r : table.rows) emit(r);
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  Eigen::MatrixXd M(static_cast<Index>(t.rows.size()), static_cast<Index>(t.header.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].size() != t.header.size())
      throw Error(ErrorCode::IoError, path.string() + ": row " + std::to_string(i + 2) + " has the wrong width");
    for (std::size_t c = 0; c < t.header.size(); ++c)
      M(static_cast<Index>(i), static_cast<Index>(c)) = require_double(t.rows[i][c], path, i + 2);
  }
  return M;
}

void write_matrix_csv(const fs::path& path, const std::vector<std::string>& header, const Eigen::MatrixXd& values) {
  if (static_cast<Index>(header.size()) != values.cols())
    throw Error(ErrorCode::InvalidArgument, "header width must match the matrix");
  CsvTable t;
  t.header = header;
  t.rows.reserve(static_cast<std::size_t>(values.rows()));
  for (Index i = 0; i < values.rows(); ++i) {
    std::vector<std::string> row;
    for (Index c = 0; c < values.cols(); ++c) row.push_back(format_double(values(i, c)));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

std::vector<int> read_labels_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  std::size_t col = t.header.size() - 1;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (t.header[c] == "label") col = c;
  std::vector<int> labels;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (col >= t.rows[i].size()) throw Error(ErrorCode::IoError, path.string() + ": short row");
    const auto& f = t.rows[i][col];
    int v = 0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size())
      throw Error(ErrorCode::IoError, path.string() + ": label '" + f + "' is not an integer");
    labels.push_back(v);
  }
  return labels;
}

void write_gap_table_csv(const fs::path& path, const GapTable& table) {
  CsvTable t;
  t.header.push_back("beta");
  for (int m = 2; m <= table.m_max; ++m) t.header.push_back("r_" + std::to_string(m));
  for (std::size_t c = 0; c < table.betas.size(); ++c) {
    std::vector<std::string> row{format_double(table.betas[c])};
    for (Index r = 0; r < table.gaps.rows(); ++r) {
      const double g = table.gaps(r, static_cast<Index>(c));
      row.push_back(std::isnan(g) ? std::string() : format_double(g));
    }
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

Json model_json(const FitResult& result) {
  const MacrostateModel& model = result.model;
  Json j;
  j["beta"] = model.beta;
  j["m"] = model.m();
  j["upsilon"] = model.upsilon;
  j["a"] = std::vector<double>(model.a.data(), model.a.data() + model.a.size());
  Json M = Json::array();
  for (Index r = 0; r < model.M.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(model.M.cols()));
    for (Index c = 0; c < model.M.cols(); ++c) row[static_cast<std::size_t>(c)] = model.M(r, c);
    M.push_back(row);
  }
  j["M"] = M;
  j["rates"] = std::vector<double>(result.basis.rates.data(), result.basis.rates.data() + result.basis.rates.size());
  Json gaps = Json::object();
  for (const auto& [m, g] : result.gaps.gaps) gaps[std::to_string(m)] = g;
  j["gaps"] = gaps;
  if (result.crisp) {
    j["crisp_upsilon"] = result.crisp->upsilon;
    j["crisp_a"] = std::vector<double>(result.crisp->a.data(), result.crisp->a.data() + result.crisp->a.size());
  }
  return j;
}

Json error_json(const std::exception& e) {
  Json j;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = std::string(to_string(err->code()));
    const std::string what = err->what();
    const auto colon = what.find(": ");
    j["message"] = colon == std::string::npos ? what : what.substr(colon + 2);
    if (err->count() >= 0) j["count"] = err->count();
  } else {
    j["error"] = "InternalError";
    j["message"] = e.what();
  }
  return j;
}

void write_json(const fs::path& path, const Json& json) {
  auto out = open_out(path);
  out << json.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace macrostate
