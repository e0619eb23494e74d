#include "patchdyn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "patchdyn/model.hpp"

namespace patchdyn {

std::string render_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

bool parse_full_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  const auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

bool parse_full_int(const std::string& s, int& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  const auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

// Cells are rendered strings; numeric-looking cells are emitted as raw JSON
// numbers so NDJSON mirrors the CSV payload exactly.
void append_json_value(std::string& line, const std::string& cell) {
  double d;
  if (cell.empty()) {
    line += "null";
  } else if (cell == "true" || cell == "false") {
    line += cell;
  } else if (parse_full_double(cell, d) && std::isfinite(d)) {
    line += cell;
  } else {
    nlohmann::json j = cell;
    line += j.dump();
  }
}

}  // namespace

bool write_table(const Table& t, const std::string& path, OutFormat format) {
  std::ofstream f(path);
  if (!f) return false;
  if (format == OutFormat::csv) {
    for (size_t c = 0; c < t.columns.size(); ++c)
      f << (c ? "," : "") << csv_escape(t.columns[c]);
    f << "\n";
    for (const auto& row : t.rows) {
      for (size_t c = 0; c < row.size(); ++c) f << (c ? "," : "") << csv_escape(row[c]);
      f << "\n";
    }
    for (const auto& footer : t.footers) {
      f << "#";
      for (const auto& [k, v] : footer) f << " " << k << "=" << v;
      f << "\n";
    }
  } else {
    for (const auto& row : t.rows) {
      std::string line = "{";
      for (size_t c = 0; c < row.size() && c < t.columns.size(); ++c) {
        if (c) line += ",";
        line += nlohmann::json(t.columns[c]).dump();
        line += ":";
        append_json_value(line, row[c]);
      }
      line += "}";
      f << line << "\n";
    }
    for (const auto& footer : t.footers) {
      std::string line = "{\"record\":\"footer\"";
      for (const auto& [k, v] : footer) {
        line += ",";
        line += nlohmann::json(k).dump();
        line += ":";
        append_json_value(line, v);
      }
      line += "}";
      f << line << "\n";
    }
  }
  return f.good();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
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
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string json_value_to_cell(const nlohmann::ordered_json& v) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return render_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

}  // namespace

std::optional<Table> read_table(const std::string& path, OutFormat format) {
  std::ifstream f(path);
  if (!f) return std::nullopt;
  Table t;
  std::string line;
  if (format == OutFormat::csv) {
    bool have_header = false;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::vector<std::pair<std::string, std::string>> footer;
        std::istringstream ss(line.substr(1));
        std::string tok;
        while (ss >> tok) {
          const size_t eq = tok.find('=');
          if (eq != std::string::npos)
            footer.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        }
        t.footers.push_back(std::move(footer));
        continue;
      }
      if (!have_header) {
        t.columns = split_csv_line(line);
        have_header = true;
      } else {
        t.rows.push_back(split_csv_line(line));
      }
    }
  } else {
    while (std::getline(f, line)) {
      if (trim(line).empty()) continue;
      nlohmann::ordered_json j = nlohmann::ordered_json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) return std::nullopt;
      if (j.contains("record")) {
        std::vector<std::pair<std::string, std::string>> footer;
        for (const auto& [k, v] : j.items())
          if (k != "record") footer.emplace_back(k, json_value_to_cell(v));
        t.footers.push_back(std::move(footer));
        continue;
      }
      if (t.columns.empty())
        for (const auto& [k, v] : j.items()) t.columns.push_back(k);
      std::vector<std::string> row;
      for (const auto& col : t.columns)
        row.push_back(j.contains(col) ? json_value_to_cell(j.at(col)) : std::string());
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

struct KeySpec {
  const char* key;
  enum Kind { number, integer, word } kind;
  bool required;
};

const std::map<std::string, std::vector<KeySpec>>& section_schemas() {
  static const std::map<std::string, std::vector<KeySpec>> schemas = {
      {"model",
       {{"r1", KeySpec::number, false},
        {"r2", KeySpec::number, false},
        {"K1", KeySpec::number, true},
        {"K2", KeySpec::number, true},
        {"a1", KeySpec::number, true},
        {"a2", KeySpec::number, true},
        {"d1", KeySpec::number, true},
        {"d2", KeySpec::number, true},
        {"rho1", KeySpec::number, false},
        {"rho2", KeySpec::number, false},
        {"s", KeySpec::number, false}}},
      {"integrate",
       {{"rel_tol", KeySpec::number, false},
        {"abs_tol", KeySpec::number, false},
        {"t_end", KeySpec::number, false},
        {"max_step", KeySpec::number, false},
        {"tail_fraction", KeySpec::number, false},
        {"extinction_eps", KeySpec::number, false},
        {"cycle_amplitude_eps", KeySpec::number, false},
        {"keep_samples", KeySpec::integer, false}}},
      {"simulate",
       {{"x1", KeySpec::number, true},
        {"y1", KeySpec::number, true},
        {"x2", KeySpec::number, true},
        {"y2", KeySpec::number, true}}},
      {"equilibria", {{"grid_density", KeySpec::integer, false}}},
      {"sweep1d",
       {{"family", KeySpec::word, false},
        {"source_patch", KeySpec::integer, false},
        {"s_min", KeySpec::number, false},
        {"s_max", KeySpec::number, false},
        {"n", KeySpec::integer, false}}},
      {"sweep2d",
       {{"p1", KeySpec::word, false},
        {"p1_min", KeySpec::number, false},
        {"p1_max", KeySpec::number, false},
        {"p1_n", KeySpec::integer, false},
        {"p2", KeySpec::word, false},
        {"p2_min", KeySpec::number, false},
        {"p2_max", KeySpec::number, false},
        {"p2_n", KeySpec::integer, false}}}};
  return schemas;
}

std::vector<std::string> sections_for(const std::string& command) {
  if (command == "classify") return {"model"};
  if (command == "equilibria") return {"model", "equilibria"};
  if (command == "simulate") return {"model", "integrate", "simulate"};
  if (command == "sweep1d") return {"model", "sweep1d", "equilibria"};
  if (command == "sweep2d") return {"model", "sweep2d", "equilibria"};
  return {};
}

}  // namespace

ConfigResult load_config(const std::string& path, const std::string& command) {
  ConfigResult out;
  const std::vector<std::string> allowed = sections_for(command);
  if (allowed.empty()) {
    out.error = "unknown command " + command;
    return out;
  }

  std::ifstream f(path);
  if (!f) {
    out.error = "cannot open config file " + path;
    return out;
  }

  std::map<std::string, std::string> values;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      out.error = "line " + std::to_string(lineno) + ": expected key = value";
      return out;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (values.count(key)) {
      out.error = "duplicate key " + key;
      return out;
    }
    values[key] = value;
  }

  // schema check: every key must be known and belong to an allowed section
  for (const auto& [key, value] : values) {
    const size_t dot = key.find('.');
    if (dot == std::string::npos) {
      out.error = "key " + key + " is missing its section prefix";
      return out;
    }
    const std::string section = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    const auto schema_it = section_schemas().find(section);
    if (schema_it == section_schemas().end() ||
        std::find(allowed.begin(), allowed.end(), section) == allowed.end()) {
      out.error = "unknown section " + section + " for command " + command;
      return out;
    }
    const auto& specs = schema_it->second;
    const auto spec = std::find_if(specs.begin(), specs.end(),
                                   [&](const KeySpec& k) { return name == k.key; });
    if (spec == specs.end()) {
      out.error = "unknown key " + key;
      return out;
    }
    if (spec->kind == KeySpec::number) {
      double d;
      if (!parse_full_double(value, d)) {
        out.error = "key " + key + " must be a number";
        return out;
      }
    } else if (spec->kind == KeySpec::integer) {
      int n;
      if (!parse_full_int(value, n)) {
        out.error = "key " + key + " must be an integer";
        return out;
      }
    }
  }
  for (const std::string& section : allowed) {
    for (const KeySpec& spec : section_schemas().at(section)) {
      if (spec.required && !values.count(section + "." + std::string(spec.key))) {
        out.error = "missing required key " + std::string(spec.key) +
                    " (section " + section + ")";
        return out;
      }
    }
  }

  RunConfig cfg;
  auto num = [&](const std::string& key, double dflt) {
    const auto it = values.find(key);
    if (it == values.end()) return dflt;
    double d = dflt;
    parse_full_double(it->second, d);
    return d;
  };
  auto integer = [&](const std::string& key, int dflt) {
    const auto it = values.find(key);
    if (it == values.end()) return dflt;
    int n = dflt;
    parse_full_int(it->second, n);
    return n;
  };

  cfg.model.r1 = num("model.r1", 1.0);
  cfg.model.r2 = num("model.r2", 1.0);
  cfg.model.K1 = num("model.K1", 0.0);
  cfg.model.K2 = num("model.K2", 0.0);
  cfg.model.a1 = num("model.a1", 0.0);
  cfg.model.a2 = num("model.a2", 0.0);
  cfg.model.d1 = num("model.d1", 0.0);
  cfg.model.d2 = num("model.d2", 0.0);
  cfg.model.rho1 = num("model.rho1", 0.0);
  cfg.model.rho2 = num("model.rho2", 0.0);
  cfg.model.s = num("model.s", 0.0);
  const std::string model_error = validate(cfg.model);
  if (!model_error.empty()) {
    out.error = model_error;
    return out;
  }

  cfg.integration.rel_tol = num("integrate.rel_tol", cfg.integration.rel_tol);
  cfg.integration.abs_tol = num("integrate.abs_tol", cfg.integration.abs_tol);
  cfg.integration.t_end = num("integrate.t_end", cfg.integration.t_end);
  cfg.integration.max_step = num("integrate.max_step", cfg.integration.max_step);
  cfg.integration.tail_fraction =
      num("integrate.tail_fraction", cfg.integration.tail_fraction);
  cfg.integration.extinction_eps =
      num("integrate.extinction_eps", cfg.integration.extinction_eps);
  cfg.integration.cycle_amplitude_eps =
      num("integrate.cycle_amplitude_eps", cfg.integration.cycle_amplitude_eps);
  cfg.integration.keep_samples =
      integer("integrate.keep_samples", cfg.integration.keep_samples);
  if (cfg.integration.rel_tol <= 0 || cfg.integration.abs_tol <= 0) {
    out.error = "integrate tolerances must be positive";
    return out;
  }
  if (cfg.integration.tail_fraction <= 0 || cfg.integration.tail_fraction >= 1) {
    out.error = "tail_fraction must lie strictly between 0 and 1";
    return out;
  }
  if (cfg.integration.t_end <= 0) {
    out.error = "t_end must be positive";
    return out;
  }

  if (command == "simulate") {
    cfg.initial = {num("simulate.x1", 0), num("simulate.y1", 0),
                   num("simulate.x2", 0), num("simulate.y2", 0)};
    cfg.has_initial = true;
    if (!cfg.initial.nonnegative()) {
      out.error = "simulate initial state must be nonnegative";
      return out;
    }
  }

  cfg.grid_density = integer("equilibria.grid_density", 30);
  if (cfg.grid_density < 2) {
    out.error = "grid_density must be at least 2";
    return out;
  }

  if (command == "sweep1d") {
    const std::string family = values.count("sweep1d.family")
                                   ? values.at("sweep1d.family")
                                   : "full-interior";
    if (family == "subsystem-interior")
      cfg.family = EquilibriumFamily::subsystem_interior;
    else if (family == "mixed-boundary")
      cfg.family = EquilibriumFamily::mixed_boundary;
    else if (family == "full-interior")
      cfg.family = EquilibriumFamily::full_interior;
    else {
      out.error = "sweep1d.family must be subsystem-interior, mixed-boundary "
                  "or full-interior";
      return out;
    }
    cfg.source_patch = integer("sweep1d.source_patch", 1);
    if (cfg.source_patch != 1 && cfg.source_patch != 2) {
      out.error = "sweep1d.source_patch must be 1 or 2";
      return out;
    }
    cfg.s_min = num("sweep1d.s_min", 0.0);
    cfg.s_max = num("sweep1d.s_max", 0.99);
    cfg.s_n = integer("sweep1d.n", 200);
    if (cfg.s_min < 0 || cfg.s_max >= 1.0 || cfg.s_min > cfg.s_max) {
      out.error = "sweep1d s range must lie in [0,1)";
      return out;
    }
    if (cfg.s_n < 1) {
      out.error = "sweep1d.n must be at least 1";
      return out;
    }
  }

  if (command == "sweep2d") {
    auto read_axis = [&](const std::string& prefix, const AxisSpec& dflt,
                         AxisSpec& ax) -> bool {
      ax.name = values.count("sweep2d." + prefix) ? values.at("sweep2d." + prefix)
                                                  : dflt.name;
      ax.lo = num("sweep2d." + prefix + "_min", dflt.lo);
      ax.hi = num("sweep2d." + prefix + "_max", dflt.hi);
      ax.n = integer("sweep2d." + prefix + "_n", dflt.n);
      if (ax.name != "s" && ax.name != "rho1" && ax.name != "rho2") {
        out.error = "sweep2d." + prefix + " must be one of s, rho1, rho2";
        return false;
      }
      if (ax.n < 1) {
        out.error = "sweep2d." + prefix + "_n must be at least 1";
        return false;
      }
      if (ax.name == "s" && (ax.lo < 0 || ax.hi >= 1.0)) {
        out.error = "sweep2d s axis range must lie in [0,1)";
        return false;
      }
      if (ax.lo > ax.hi) {
        out.error = "sweep2d." + prefix + " range is inverted";
        return false;
      }
      return true;
    };
    if (!read_axis("p1", AxisSpec{"s", 0.0, 0.99, 150}, cfg.axis1)) return out;
    if (!read_axis("p2", AxisSpec{"rho1", 0.1, 15.0, 150}, cfg.axis2)) return out;
  }

  out.config = std::move(cfg);
  return out;
}

// ---------------------------------------------------------------------------
// schema documentation

std::string schema_text(const std::string& command) {
  std::ostringstream os;
  os << "command: " << command << "\n";
  os << "config keys (section.key = value, '#' comments):\n";
  for (const std::string& section : sections_for(command)) {
    for (const KeySpec& k : section_schemas().at(section)) {
      os << "  " << section << "." << k.key << (k.required ? "  (required)" : "")
         << "\n";
    }
  }
  os << "output columns";
  if (command == "classify") {
    os << " (one row):\n  patch1_regime,patch2_regime,mu1,nu1,mu2,nu2,hopf1,hopf2,"
          "threshold1,threshold2,persist1_guaranteed,persist2_guaranteed,"
          "global_ek_stable,bound_T,bound_dmin,envelope,ek_stable_closed_form,"
          "ek_inequality1,ek_inequality2\n";
  } else if (command == "equilibria") {
    os << ":\n  class,x1,y1,x2,y2,residual,label,eig_re_1,eig_re_2,eig_re_3,"
          "eig_re_4,eig_im_1,eig_im_2,eig_im_3,eig_im_4,provenance\n";
  } else if (command == "simulate") {
    os << ":\n  t,x1,y1,x2,y2\n  footer: summary record (attractor, state, "
          "period, persistence, l_tail_max)\n";
  } else if (command == "sweep1d") {
    os << ":\n  s,branch_id,x1,y1,x2,y2,label\n";
  } else if (command == "sweep2d") {
    os << ":\n  p1,p2,interior_count,failed_flag\n";
  }
  os << "numbers are serialized as shortest round-trip decimals (<= 17 "
        "significant digits)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// commands

namespace {

StabilityLabel label_of(const ModelParams& p, const State4& u) {
  return classify(Eigen::MatrixXd(jacobian_full(p, u)));
}

std::vector<std::string> equilibrium_row(const EquilibriumRecord& rec,
                                         const StabilityLabel& label) {
  std::vector<std::string> row;
  row.push_back(to_string(rec.cls));
  for (double v : rec.state.to_array()) row.push_back(render_double(v));
  row.push_back(render_double(rec.residual));
  row.push_back(to_string(label.label));
  for (int k = 0; k < 4; ++k)
    row.push_back(k < static_cast<int>(label.eigenvalues.size())
                      ? render_double(label.eigenvalues[k].real())
                      : std::string());
  for (int k = 0; k < 4; ++k)
    row.push_back(k < static_cast<int>(label.eigenvalues.size())
                      ? render_double(label.eigenvalues[k].imag())
                      : std::string());
  row.push_back(to_string(rec.provenance));
  return row;
}

int write_or_fail(const Table& table, const CliOptions& opts, std::ostream& out) {
  if (opts.out_path.empty()) return 0;
  if (!write_table(table, opts.out_path, opts.format)) {
    out << "error: cannot write " << opts.out_path << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int cmd_classify(const CliOptions& opts, std::ostream& out) {
  const ConfigResult loaded = load_config(opts.config_path, "classify");
  if (!loaded.config) {
    out << "config error: " << loaded.error << "\n";
    return 2;
  }
  const ModelParams& p = loaded.config->model;
  const DerivedParams dp = derive(p);
  const SinglePatchRegime reg1 = single_patch_regime(p.r1, p.K1, p.a1, p.d1);
  const SinglePatchRegime reg2 = single_patch_regime(p.r2, p.K2, p.a2, p.d2);
  const PersistenceReport pr = persistence_report(p);
  const BothPreyStability ek = ek1k2_closed_form(p);

  auto opt_str = [](const std::optional<double>& v) {
    return v ? render_double(*v) : std::string("undefined");
  };
  out << "patch 1: " << to_string(reg1) << "  (mu1=" << opt_str(dp.mu1)
      << ", nu1=" << opt_str(dp.nu1) << ", hopf1=" << render_double(dp.hopf1)
      << ")\n";
  out << "patch 2: " << to_string(reg2) << "  (mu2=" << opt_str(dp.mu2)
      << ", nu2=" << opt_str(dp.nu2) << ", hopf2=" << render_double(dp.hopf2)
      << ")\n";
  out << "predator persistence guaranteed: patch1="
      << (pr.persist1_guaranteed ? "yes" : "inconclusive")
      << " (threshold=" << render_double(pr.threshold1) << ")"
      << " patch2=" << (pr.persist2_guaranteed ? "yes" : "inconclusive")
      << " (threshold=" << render_double(pr.threshold2) << ")\n";
  out << "(K1,0,K2,0) globally stable: " << (pr.global_ek_stable ? "yes" : "no")
      << "; locally stable by closed form: " << (ek.stable ? "yes" : "no")
      << " (lhs1=" << render_double(ek.inequality1)
      << ", lhs2=" << render_double(ek.inequality2) << ")\n";
  out << "boundedness: T=" << render_double(pr.bound_T)
      << " d_min=" << render_double(pr.bound_dmin)
      << " envelope=" << render_double(pr.envelope) << "\n";

  Table table;
  table.columns = {"patch1_regime", "patch2_regime", "mu1", "nu1", "mu2", "nu2",
                   "hopf1", "hopf2", "threshold1", "threshold2",
                   "persist1_guaranteed", "persist2_guaranteed",
                   "global_ek_stable", "bound_T", "bound_dmin", "envelope",
                   "ek_stable_closed_form", "ek_inequality1", "ek_inequality2"};
  auto opt_cell = [](const std::optional<double>& v) {
    return v ? render_double(*v) : std::string();
  };
  table.rows.push_back(
      {to_string(reg1), to_string(reg2), opt_cell(dp.mu1), opt_cell(dp.nu1),
       opt_cell(dp.mu2), opt_cell(dp.nu2), render_double(dp.hopf1),
       render_double(dp.hopf2), render_double(pr.threshold1),
       render_double(pr.threshold2), pr.persist1_guaranteed ? "true" : "false",
       pr.persist2_guaranteed ? "true" : "false",
       pr.global_ek_stable ? "true" : "false", render_double(pr.bound_T),
       render_double(pr.bound_dmin), render_double(pr.envelope),
       ek.stable ? "true" : "false", render_double(ek.inequality1),
       render_double(ek.inequality2)});
  return write_or_fail(table, opts, out);
}

int cmd_equilibria(const CliOptions& opts, std::ostream& out) {
  const ConfigResult loaded = load_config(opts.config_path, "equilibria");
  if (!loaded.config) {
    out << "config error: " << loaded.error << "\n";
    return 2;
  }
  const RunConfig& cfg = *loaded.config;
  const ModelParams& p = cfg.model;

  std::vector<std::pair<EquilibriumRecord, StabilityLabel>> found;
  for (const EquilibriumRecord& rec : trivial_boundaries(p))
    found.emplace_back(rec, label_of(p, rec.state));
  if (p.s == 0.0 || p.s == 1.0) {
    for (const SpecialCaseEquilibrium& item : special_case_equilibria(p).items)
      found.emplace_back(item.record, label_of(p, item.record.state));
  }
  if (p.s < 1.0) {
    for (const EquilibriumRecord& rec : mixed_boundary_equilibria(p))
      found.emplace_back(rec, label_of(p, rec.state));
  }
  std::vector<EquilibriumRecord> interiors =
      interior_equilibria(p, cfg.grid_density);
  const SymmetricInteriorResult sym = symmetric_interior(p);
  for (EquilibriumRecord& rec : interiors) {
    if (sym.record) {
      const double d = std::fabs(rec.state.x1 - sym.record->state.x1) +
                       std::fabs(rec.state.x2 - sym.record->state.x2);
      if (d < 1e-7 * (1.0 + sym.record->state.max_norm()))
        rec.cls = EqClass::symmetric_interior;
    }
    found.emplace_back(rec, label_of(p, rec.state));
  }

  Table table;
  table.columns = {"class", "x1", "y1", "x2", "y2", "residual", "label",
                   "eig_re_1", "eig_re_2", "eig_re_3", "eig_re_4",
                   "eig_im_1", "eig_im_2", "eig_im_3", "eig_im_4", "provenance"};
  out << "equilibria found: " << found.size() << "\n";
  for (const auto& [rec, label] : found) {
    table.rows.push_back(equilibrium_row(rec, label));
    out << "  " << to_string(rec.cls) << " (" << render_double(rec.state.x1)
        << ", " << render_double(rec.state.y1) << ", "
        << render_double(rec.state.x2) << ", " << render_double(rec.state.y2)
        << ") " << to_string(label.label) << "\n";
  }
  return write_or_fail(table, opts, out);
}

int cmd_simulate(const CliOptions& opts, std::ostream& out) {
  const ConfigResult loaded = load_config(opts.config_path, "simulate");
  if (!loaded.config) {
    out << "config error: " << loaded.error << "\n";
    return 2;
  }
  RunConfig cfg = *loaded.config;
  if (cfg.integration.keep_samples <= 0) cfg.integration.keep_samples = 2000;

  const TrajectorySummary summary = integrate(cfg.model, cfg.initial, cfg.integration);

  Table table;
  table.columns = {"t", "x1", "y1", "x2", "y2"};
  for (const auto& row : summary.samples) {
    table.rows.push_back({render_double(row[0]), render_double(row[1]),
                          render_double(row[2]), render_double(row[3]),
                          render_double(row[4])});
  }
  std::vector<std::pair<std::string, std::string>> footer;
  footer.emplace_back("summary", "trajectory");
  footer.emplace_back("attractor", to_string(summary.attractor));
  const auto st = summary.attractor_state.to_array();
  const char* names[] = {"x1", "y1", "x2", "y2"};
  for (int i = 0; i < 4; ++i) footer.emplace_back(names[i], render_double(st[i]));
  footer.emplace_back("period", render_double(summary.cycle_period));
  footer.emplace_back("l_tail_max", render_double(summary.l_tail_max));
  for (int i = 0; i < 4; ++i)
    footer.emplace_back(std::string("persist_") + names[i],
                        summary.persistent[i] ? "true" : "false");
  if (summary.failure) {
    footer.emplace_back("failed", summary.failure->kind ==
                                          IntegrationFailure::Kind::step_underflow
                                      ? "step_underflow"
                                      : "nonfinite");
    footer.emplace_back("failed_at", render_double(summary.failure->t));
  }
  table.footers.push_back(std::move(footer));

  out << "attractor: " << to_string(summary.attractor) << " at ("
      << render_double(st[0]) << ", " << render_double(st[1]) << ", "
      << render_double(st[2]) << ", " << render_double(st[3]) << ")";
  if (summary.attractor == AttractorType::limit_cycle)
    out << " period~" << render_double(summary.cycle_period);
  out << "\n";
  if (summary.failure) {
    out << "integration failed at t=" << render_double(summary.failure->t) << "\n";
    const int io_rc = write_or_fail(table, opts, out);
    return io_rc != 0 ? io_rc : 1;
  }
  return write_or_fail(table, opts, out);
}

int cmd_sweep1d(const CliOptions& opts, std::ostream& out) {
  const ConfigResult loaded = load_config(opts.config_path, "sweep1d");
  if (!loaded.config) {
    out << "config error: " << loaded.error << "\n";
    return 2;
  }
  const RunConfig& cfg = *loaded.config;
  std::vector<double> grid(cfg.s_n);
  for (int k = 0; k < cfg.s_n; ++k)
    grid[k] = cfg.s_n == 1 ? cfg.s_min
                           : cfg.s_min + (cfg.s_max - cfg.s_min) * k / (cfg.s_n - 1);
  const Sweep1DResult sweep = sweep1d(cfg.model, cfg.family, grid,
                                      cfg.source_patch, cfg.grid_density);
  Table table;
  table.columns = {"s", "branch_id", "x1", "y1", "x2", "y2", "label"};
  for (size_t k = 0; k < sweep.grid.size(); ++k) {
    for (size_t i = 0; i < sweep.points[k].size(); ++i) {
      const BranchPoint& bp = sweep.points[k][i];
      const auto st = bp.record.state.to_array();
      table.rows.push_back({render_double(sweep.grid[k]),
                            std::to_string(sweep.branch_ids[k][i]),
                            render_double(st[0]), render_double(st[1]),
                            render_double(st[2]), render_double(st[3]),
                            to_string(bp.label.label)});
    }
  }
  out << "sweep1d " << to_string(cfg.family) << ": " << sweep.grid.size()
      << " grid points, " << table.rows.size() << " branch points\n";
  return write_or_fail(table, opts, out);
}

int cmd_sweep2d(const CliOptions& opts, std::ostream& out) {
  const ConfigResult loaded = load_config(opts.config_path, "sweep2d");
  if (!loaded.config) {
    out << "config error: " << loaded.error << "\n";
    return 2;
  }
  const RunConfig& cfg = *loaded.config;
  SweepGrid grid;
  try {
    grid = sweep2d(cfg.model, cfg.axis1, cfg.axis2, cfg.grid_density, opts.jobs);
  } catch (const std::exception& e) {
    out << "config error: " << e.what() << "\n";
    return 2;
  }
  Table table;
  table.columns = {"p1", "p2", "interior_count", "failed_flag"};
  for (int i = 0; i < grid.axis1.n; ++i)
    for (int j = 0; j < grid.axis2.n; ++j) {
      const int c = grid.at(i, j);
      table.rows.push_back({render_double(grid.axis1.value_at(i)),
                            render_double(grid.axis2.value_at(j)),
                            std::to_string(c), c < 0 ? "1" : "0"});
    }
  int failed = 0;
  for (int c : grid.counts) failed += c < 0;
  out << "sweep2d " << grid.axis1.name << " x " << grid.axis2.name << ": "
      << grid.counts.size() << " cells, " << failed << " failed\n";
  const int rc = write_or_fail(table, opts, out);
  if (rc != 0) return rc;
  return failed == 0 ? 0 : 1;
}

}  // namespace patchdyn
