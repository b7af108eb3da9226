#include "gscm/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace gscm::io {

using nlohmann::json;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

double rounded(double v) { return std::stod(format_number(v)); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& field, int line) {
  double v = 0;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line) + ": not a number: '" + field + "'");
  }
  return v;
}

long long parse_integer(const std::string& field, int line) {
  long long v = 0;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line) + ": not an integer: '" + field + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  if (delim == ' ') {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

char detect_delimiter(const std::string& header) {
  for (char c : {',', '\t', ';'}) {
    if (header.find(c) != std::string::npos) return c;
  }
  return ' ';
}

bool blank(const std::string& line) { return trim(line).empty(); }

json parse_json(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("key '") + key + "' has the wrong type");
  }
}

VecX get_vector(const json& j, const char* key) {
  const auto v = get<std::vector<double>>(j, key);
  return Eigen::Map<const VecX>(v.data(), static_cast<Index>(v.size()));
}

json to_json(const VecX& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(rounded(v[i]));
  return a;
}

using Setter = std::function<void(const json&)>;

void apply_keys(const json& j, const std::map<std::string, Setter>& setters) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError("unknown config key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception&) {
      throw ParseError("config key '" + key + "' has the wrong type");
    }
  }
}

template <typename T>
Setter bind(T& target) {
  return [&target](const json& v) { target = v.get<T>(); };
}

Setter bind_mode(Mode& target) {
  return [&target](const json& v) {
    try {
      target = parse_mode(v.get<std::string>());
    } catch (const ModelError& e) {
      throw ParseError(e.what());
    }
  };
}

}  // namespace

std::vector<Polygon> read_contours(std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank(line)) break;
  }
  if (blank(line)) throw ParseError("contour file is empty");
  const char delim = detect_delimiter(line);
  const auto header = split(line, delim);
  int col_id = -1, col_idx = -1, col_x = -1, col_y = -1;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    const std::string& h = header[c];
    if (h == "contour_id") col_id = c;
    else if (h == "vertex_index") col_idx = c;
    else if (h == "x") col_x = c;
    else if (h == "y") col_y = c;
  }
  if (col_id < 0 || col_idx < 0 || col_x < 0 || col_y < 0) {
    throw ParseError("contour header must name contour_id, vertex_index, x and y");
  }

  std::map<long long, std::map<long long, Point>> rings;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto fields = split(line, delim);
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) + " fields");
    }
    const long long id = parse_integer(fields[col_id], lineno);
    const long long idx = parse_integer(fields[col_idx], lineno);
    const Point p(parse_double(fields[col_x], lineno), parse_double(fields[col_y], lineno));
    if (!rings[id].emplace(idx, p).second) {
      throw ParseError("line " + std::to_string(lineno) + ": repeated vertex index in contour " + std::to_string(id));
    }
  }
  if (rings.empty()) throw ParseError("contour file has no vertices");
  std::vector<Polygon> out;
  for (const auto& [id, verts] : rings) {
    std::vector<Point> pts;
    for (const auto& [idx, p] : verts) pts.push_back(p);
    try {
      out.emplace_back(std::move(pts));
    } catch (const GeometryError& e) {
      throw GeometryError("contour " + std::to_string(id) + ": " + e.what());
    }
  }
  return out;
}

void write_contours(std::ostream& out, std::span<const Polygon> contours) {
  out << "contour_id,vertex_index,x,y\n";
  for (std::size_t c = 0; c < contours.size(); ++c) {
    const auto v = contours[c].vertices();
    for (std::size_t k = 0; k < v.size(); ++k) {
      out << c << ',' << k << ',' << format_number(v[k].x()) << ',' << format_number(v[k].y()) << '\n';
    }
  }
}

GridGeometry read_grid_header(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && blank(line)) {
  }
  const auto f = split(line, ' ');
  if (f.size() != 5) throw ParseError("grid header must be 'rows cols origin_x origin_y cell'");
  GridGeometry g;
  g.rows = static_cast<int>(parse_integer(f[0], 1));
  g.cols = static_cast<int>(parse_integer(f[1], 1));
  g.origin = Point(parse_double(f[2], 1), parse_double(f[3], 1));
  g.cell = parse_double(f[4], 1);
  try {
    g.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("grid header: ") + e.what());
  }
  return g;
}

MatX read_real_grid(std::istream& in, GridGeometry& geom) {
  geom = read_grid_header(in);
  MatX values(geom.rows, geom.cols);
  std::string line;
  int row = 0, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    if (row == geom.rows) throw ParseError("grid has more rows than its header");
    const auto f = split(line, ' ');
    if (static_cast<int>(f.size()) != geom.cols) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(geom.cols) + " values");
    }
    for (int j = 0; j < geom.cols; ++j) values(row, j) = parse_double(f[j], lineno);
    ++row;
  }
  if (row != geom.rows) throw ParseError("grid has fewer rows than its header");
  return values;
}

BinaryGrid read_binary_grid(std::istream& in) {
  GridGeometry geom;
  const MatX v = read_real_grid(in, geom);
  BinaryGrid g(geom);
  for (int i = 0; i < geom.rows; ++i) {
    for (int j = 0; j < geom.cols; ++j) {
      if (v(i, j) != 0.0 && v(i, j) != 1.0) throw ParseError("binary grid entries must be 0 or 1");
      g.set(i, j, v(i, j) == 1.0);
    }
  }
  return g;
}

namespace {

void write_header(std::ostream& out, const GridGeometry& g) {
  out << g.rows << ' ' << g.cols << ' ' << format_number(g.origin.x()) << ' ' << format_number(g.origin.y()) << ' '
      << format_number(g.cell) << '\n';
}

}  // namespace

void write_binary_grid(std::ostream& out, const BinaryGrid& grid) {
  write_header(out, grid.geometry());
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) out << (j ? " " : "") << (grid(i, j) ? '1' : '0');
    out << '\n';
  }
}

void write_real_grid(std::ostream& out, const GridGeometry& geom, const MatX& values) {
  if (values.rows() != geom.rows || values.cols() != geom.cols) throw ModelError("grid values do not match header");
  write_header(out, geom);
  for (int i = 0; i < geom.rows; ++i) {
    for (int j = 0; j < geom.cols; ++j) out << (j ? " " : "") << format_number(values(i, j));
    out << '\n';
  }
}

GscmParams read_model(std::istream& in, double tail_limit) {
  const json j = parse_json(in);
  const int p = get<int>(j, "p");
  const VecX theta = get_vector(j, "theta");
  const VecX mu = get_vector(j, "mu");
  const VecX sigma = get_vector(j, "sigma");
  if (theta.size() != p || mu.size() != p || sigma.size() != p) throw ParseError("model vectors must have length p");
  const Point c(get<double>(j, "C_x"), get<double>(j, "C_y"));
  const double eta = j.contains("eta") ? get<double>(j, "eta") : 1e-4;
  GscmParams params = GscmParams::unchecked(LineSet(c, theta), mu, sigma, get<double>(j, "kappa"), eta);
  params.validate(tail_limit);
  return params;
}

void write_model(std::ostream& out, const GscmParams& params) {
  json j;
  j["p"] = params.p();
  j["C_x"] = rounded(params.lines.center().x());
  j["C_y"] = rounded(params.lines.center().y());
  j["theta"] = to_json(params.lines.angles());
  j["mu"] = to_json(params.mu);
  j["sigma"] = to_json(params.sigma);
  j["kappa"] = rounded(params.kappa);
  j["eta"] = rounded(params.eta);
  out << j.dump(2) << '\n';
}

void write_posterior(std::ostream& out, const PosteriorSamples& s, int first_iter) {
  const Index p = s.mu.cols();
  out << "iter,kappa";
  for (Index i = 1; i <= p; ++i) out << ",mu_" << i;
  for (Index i = 1; i <= p; ++i) out << ",sigma_" << i;
  out << '\n';
  for (Index d = 0; d < s.draws(); ++d) {
    out << first_iter + d << ',' << format_number(s.kappa[d]);
    for (Index i = 0; i < p; ++i) out << ',' << format_number(s.mu(d, i));
    for (Index i = 0; i < p; ++i) out << ',' << format_number(s.sigma(d, i));
    out << '\n';
  }
}

PosteriorSamples read_posterior(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("posterior file is empty");
  const auto header = split(line, ',');
  if (header.size() < 4 || header.size() % 2 != 0 || header[0] != "iter" || header[1] != "kappa") {
    throw ParseError("posterior header must be iter, kappa, mu_1..mu_p, sigma_1..sigma_p");
  }
  const Index p = static_cast<Index>(header.size() - 2) / 2;
  for (Index i = 0; i < p; ++i) {
    if (header[2 + i] != "mu_" + std::to_string(i + 1) || header[2 + p + i] != "sigma_" + std::to_string(i + 1)) {
      throw ParseError("posterior header must be iter, kappa, mu_1..mu_p, sigma_1..sigma_p");
    }
  }
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) throw ParseError("line " + std::to_string(lineno) + ": wrong field count");
    std::vector<double> r;
    for (std::size_t c = 1; c < f.size(); ++c) r.push_back(parse_double(f[c], lineno));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ParseError("posterior file has no draws");
  PosteriorSamples s;
  const auto n = static_cast<Index>(rows.size());
  s.kappa.resize(n);
  s.mu.resize(n, p);
  s.sigma.resize(n, p);
  for (Index d = 0; d < n; ++d) {
    s.kappa[d] = rows[d][0];
    for (Index i = 0; i < p; ++i) {
      s.mu(d, i) = rows[d][1 + i];
      s.sigma(d, i) = rows[d][1 + p + i];
    }
  }
  return s;
}

FitRecord read_fit(std::istream& in) {
  const json j = parse_json(in);
  FitRecord r;
  const Point c(get<double>(j, "C_x"), get<double>(j, "C_y"));
  r.lines = LineSet(c, get_vector(j, "theta"));
  try {
    r.mode = parse_mode(get<std::string>(j, "mode"));
  } catch (const ModelError& e) {
    throw ParseError(e.what());
  }
  const json& t = j.at("transform");
  r.transform.lo = Point(get<double>(t, "lo_x"), get<double>(t, "lo_y"));
  r.transform.hi = Point(get<double>(t, "hi_x"), get<double>(t, "hi_y"));
  r.transform.epsilon = get<double>(t, "epsilon");
  r.mask.modeled = get<std::vector<int>>(j, "modeled");
  r.mask.constant = get_vector(j, "constant");
  if (r.mask.constant.size() != r.lines.size()) throw ParseError("constant lengths must have one entry per line");
  for (int m : r.mask.modeled) {
    if (m < 0 || m >= r.lines.size()) throw ParseError("modeled line index out of range");
  }
  r.mean_area = get<double>(j, "mean_area");
  r.eta = get<double>(j, "eta");
  r.accept_sigma = get<double>(j, "accept_sigma");
  r.accept_kappa = get<double>(j, "accept_kappa");
  return r;
}

void write_fit(std::ostream& out, const FitRecord& r) {
  json j;
  j["p"] = r.lines.size();
  j["C_x"] = rounded(r.lines.center().x());
  j["C_y"] = rounded(r.lines.center().y());
  j["theta"] = to_json(r.lines.angles());
  j["mode"] = std::string(to_string(r.mode));
  j["transform"] = {{"lo_x", rounded(r.transform.lo.x())}, {"lo_y", rounded(r.transform.lo.y())},
                    {"hi_x", rounded(r.transform.hi.x())}, {"hi_y", rounded(r.transform.hi.y())},
                    {"epsilon", rounded(r.transform.epsilon)}};
  j["modeled"] = r.mask.modeled;
  j["constant"] = to_json(r.mask.constant);
  j["mean_area"] = rounded(r.mean_area);
  j["eta"] = rounded(r.eta);
  j["accept_sigma"] = rounded(r.accept_sigma);
  j["accept_kappa"] = rounded(r.accept_kappa);
  out << j.dump(2) << '\n';
}

void write_line_coverage(std::ostream& out, const CoverageReport& report) {
  out << "k,theta_k,coverage\n";
  for (Index k = 0; k < report.per_line.size(); ++k) {
    out << k + 1 << ',' << format_number(report.angles[k]) << ',' << format_number(report.per_line[k]) << '\n';
  }
}

void write_coverage_summary(std::ostream& out, std::span<const CoverageReport> reports) {
  out << "alpha,mean,sd_across_lines\n";
  for (const auto& r : reports) {
    out << format_number(r.alpha) << ',' << format_number(r.mean) << ',' << format_number(r.sd_across_lines) << '\n';
  }
}

void write_star_report(std::ostream& out, std::span<const StarShapeRow> rows) {
  out << "contour_id,mode,pct_differing_area,C_x,C_y\n";
  for (const auto& r : rows) {
    out << r.contour_id << ',' << to_string(r.mode) << ',' << format_number(r.pct_own_area) << ','
        << format_number(r.center.x()) << ',' << format_number(r.center.y()) << '\n';
  }
}

void write_runs(std::ostream& out, const ExperimentResult& result) {
  out << "run,p_hat,C_x,C_y,mean_area\n";
  for (const auto& r : result.runs) {
    out << r.run << ',' << r.p_hat << ',' << format_number(r.c_hat.x()) << ',' << format_number(r.c_hat.y()) << ','
        << format_number(r.mean_area) << '\n';
  }
}

FitSettings parse_fit_settings(const std::string& json_text) {
  FitSettings s;
  apply_keys(parse_json(json_text),
             {{"delta", bind(s.fit.delta)},
              {"growth", bind(s.fit.growth)},
              {"p0", bind(s.fit.p0)},
              {"mode", bind_mode(s.fit.mode)},
              {"lattice", bind(s.fit.lattice)},
              {"epsilon", bind(s.fit.epsilon)},
              {"max_lines", bind(s.fit.max_lines)},
              {"fixed_lines", bind(s.fixed_lines)},
              {"rescale", bind(s.rescale)},
              {"drop_constant_lines", bind(s.drop_constant_lines)},
              {"mu0", bind(s.mu0)},
              {"lambda0", bind(s.lambda0)},
              {"beta_kappa", bind(s.beta_kappa)},
              {"beta_sigma", bind(s.beta_sigma)},
              {"iterations", bind(s.mcmc.iterations)},
              {"burnin", bind(s.mcmc.burnin)},
              {"adapt_interval", bind(s.mcmc.adapt_interval)},
              {"eta", bind(s.eta)}});
  s.fit.validate();
  if (s.fixed_lines != 0 && s.fixed_lines < 3) throw ParseError("fixed_lines must be 0 or at least 3");
  return s;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json j = parse_json(json_text);
  ExperimentConfig c;
  if (j.is_object() && j.contains("scale")) {
    const auto scale = get<std::string>(j, "scale");
    if (scale == "full") c = ExperimentConfig::full();
    else if (scale != "desk") throw ParseError("scale must be 'desk' or 'full'");
  }
  std::string scale_ignored;
  AppendSpec append;
  bool has_append = false;
  double kappa = 0;
  bool has_kappa = false;
  apply_keys(j, {{"scale", bind(scale_ignored)},
                 {"shape", bind(c.shape)},
                 {"kappa",
                  [&](const json& v) {
                    kappa = v.get<double>();
                    has_kappa = true;
                  }},
                 {"n_train", bind(c.n_train)},
                 {"runs", bind(c.runs)},
                 {"delta", bind(c.delta)},
                 {"fixed_lines", bind(c.fixed_lines)},
                 {"mode", bind_mode(c.mode)},
                 {"growth", bind(c.growth)},
                 {"lattice", bind(c.lattice)},
                 {"test_lines", bind(c.test_lines)},
                 {"test_contours", bind(c.test_contours)},
                 {"alphas", bind(c.alphas)},
                 {"iterations", bind(c.iterations)},
                 {"burnin", bind(c.burnin)},
                 {"mu0", bind(c.mu0)},
                 {"lambda0", bind(c.lambda0)},
                 {"beta_kappa", bind(c.beta_kappa)},
                 {"beta_sigma", bind(c.beta_sigma)},
                 {"predictive", bind(c.predictive)},
                 {"grid", bind(c.grid)},
                 {"oracle", bind(c.oracle)},
                 {"oracle_samples", bind(c.oracle_samples)},
                 {"selection_only", bind(c.selection_only)},
                 {"seed", bind(c.seed)},
                 {"append", [&](const json& v) {
                    has_append = true;
                    apply_keys(v, {{"loops_lo", bind(append.loops_lo)},
                                   {"loops_hi", bind(append.loops_hi)},
                                   {"offset_lo", bind(append.offset_lo)},
                                   {"offset_hi", bind(append.offset_hi)},
                                   {"width_lo", bind(append.width_lo)},
                                   {"width_hi", bind(append.width_hi)},
                                   {"fixed_location", bind(append.fixed_location)},
                                   {"fixed_index", bind(append.fixed_index)},
                                   {"max_retries", bind(append.max_retries)}});
                  }}});
  if (has_kappa) c.kappa = kappa;
  if (has_append) c.append = append;
  c.validate();
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace gscm::io
