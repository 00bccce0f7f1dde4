#include "hjperf/experiments.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace hjperf {

namespace {

using nlohmann::ordered_json;

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

const char* flag(bool b) { return b ? "true" : "false"; }

// Numbers pass through %.12g so the summary matches the CSVs digit for digit.
ordered_json jnum(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return std::stod(num(x));
}

ordered_json jvec(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(jnum(x));
  return a;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw std::runtime_error("error writing " + path.string());
}

template <typename W, typename T>
std::string render(W write, const T& table) {
  std::ostringstream os;
  write(table, os);
  return os.str();
}

ordered_json rate_summary(const RateTable& t) {
  if (t.rows.empty()) return "no data";
  ordered_json j;
  j["hbar"] = jnum(t.hbar);
  j["hbar_floor"] = jnum(t.hbar_floor);
  j["floor"] = jnum(t.floor);
  j["floor_errors"] = jvec(t.floor_errors);
  j["slope"] = t.fitted ? jnum(t.slope) : ordered_json(nullptr);
  j["intercept"] = t.fitted ? jnum(t.intercept) : ordered_json(nullptr);
  j["decreasing"] = t.decreasing;
  j["pass"] = t.pass;
  return j;
}

ordered_json dilute_summary(const DiluteTable& t) {
  if (t.rows.empty()) return "no data";
  ordered_json j;
  j["hbar0"] = jnum(t.hbar0);
  j["constants"] = {{"C_a", jnum(t.C_a)}, {"C_c", jnum(t.C_c)}, {"C_d", jnum(t.C_d)}};
  ordered_json rows = ordered_json::array();
  for (const DiluteRow& r : t.rows)
    rows.push_back({{"epsilon", jnum(r.epsilon)},
                    {"violation_lower", jnum(r.violation[0])},
                    {"violation_order", jnum(r.violation[1])},
                    {"violation_upper", jnum(r.violation[2])},
                    {"violation_limit", jnum(r.violation[3])},
                    {"ratio", jnum(r.ratio_c)},
                    {"ratio_sharp", jnum(r.ratio_sharp)},
                    {"pass", r.pass}});
  j["inequalities"] = rows;
  j["regression"] = {{"C", jnum(t.regression_C)},
                     {"residual", jnum(t.regression_residual)},
                     {"ratio_spread", jnum(t.ratio_spread)}};
  j["eta_sweep"] = {{"eta", jvec(t.sweep_etas)},
                    {"gap", jvec(t.sweep_gaps)},
                    {"c", jnum(t.sweep_c)},
                    {"b", jnum(t.sweep_b)}};
  j["pass"] = t.pass;
  return j;
}

ordered_json defect_summary(const DefectTable& t) {
  if (t.rows.empty()) return "no data";
  ordered_json j;
  j["defects"] = to_string(t.kind);
  j["hbar"] = jnum(t.hbar);
  const char* q = t.kind == DefectSpec::Kind::LineE1      ? "theta"
                  : t.kind == DefectSpec::Kind::SquaresE1 ? "delta"
                                                          : "max_V";
  j[q] = jnum(t.quantity);
  if (t.kind == DefectSpec::Kind::SquaresE1) j["weight_integral"] = jnum(t.weight_integral);
  j["rate_constant"] = jnum(t.rate_constant);
  j["pass"] = t.pass;
  return j;
}

ordered_json effective_summary(const EffectiveTable& t) {
  if (t.rows.empty()) return "no data";
  ordered_json j;
  j["k_list"] = t.k_list;
  j["lambda_list"] = jvec(t.lambda_list);
  ordered_json h = ordered_json::array();
  for (const EffectiveRow& r : t.rows)
    if (r.kind != "Lbar")
      h.push_back({{"kind", r.kind}, {"p", {jnum(r.component1), jnum(r.component2)}}, {"value", jnum(r.value)}});
  j["hbar"] = h;
  j["lbar_samples"] = std::count_if(t.rows.begin(), t.rows.end(), [](const EffectiveRow& r) { return r.kind == "Lbar"; });
  return j;
}

std::string checks_csv(const std::vector<Check>& checks) {
  std::string s = "name,pass,value,bound\n";
  for (const Check& c : checks) s += c.name + "," + flag(c.pass) + "," + num(c.value) + "," + num(c.bound) + "\n";
  return s;
}

}  // namespace

void write_rate_csv(const RateTable& t, std::ostream& os) {
  os << "epsilon,sup_error,runtime_s\n";
  for (const RateRow& r : t.rows) os << num(r.epsilon) << ',' << num(r.sup_error) << ',' << num(r.runtime_s) << '\n';
}

void write_dilute_csv(const DiluteTable& t, std::ostream& os) {
  os << "epsilon,eta,gap,bound,pass\n";
  for (const DiluteRow& r : t.rows)
    os << num(r.epsilon) << ',' << num(r.eta) << ',' << num(r.gap) << ',' << num(r.bound) << ','
       << flag(r.pass) << '\n';
}

void write_defect_csv(const DefectTable& t, std::ostream& os) {
  os << "epsilon,probe_x,probe_y,t,w,u,gap,bound,pass\n";
  for (const DefectRow& r : t.rows)
    os << num(r.epsilon) << ',' << num(r.probe.x()) << ',' << num(r.probe.y()) << ',' << num(r.t) << ','
       << num(r.w) << ',' << num(r.u) << ',' << num(r.gap) << ',' << num(r.bound) << ','
       << flag(r.pass) << '\n';
}

void emit_report(const Report& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ordered_json summary;
  if (report.rate) {
    write_file(out_dir / "rate.csv", render(write_rate_csv, *report.rate));
    summary["rate"] = rate_summary(*report.rate);
  }
  if (report.dilute) {
    write_file(out_dir / "dilute.csv", render(write_dilute_csv, *report.dilute));
    summary["dilute"] = dilute_summary(*report.dilute);
  }
  if (report.defect) {
    write_file(out_dir / "defect.csv", render(write_defect_csv, *report.defect));
    summary["defect"] = defect_summary(*report.defect);
  }
  if (report.effective) {
    write_file(out_dir / "effective.csv", render(write_effective_csv, *report.effective));
    summary["effective"] = effective_summary(*report.effective);
  }
  if (report.checks) {
    write_file(out_dir / "validate.csv", checks_csv(*report.checks));
    if (report.checks->empty()) {
      summary["validate"] = "no data";
    } else {
      ordered_json v;
      for (const Check& c : *report.checks)
        v[c.name] = {{"pass", c.pass}, {"value", jnum(c.value)}, {"bound", jnum(c.bound)}, {"detail", c.detail}};
      summary["validate"] = v;
    }
  }
  summary["pass"] = report.pass;
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace hjperf
