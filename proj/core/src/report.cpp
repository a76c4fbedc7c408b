#include "phibound/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phibound/errors.hpp"

namespace phib {

namespace {

using Json = nlohmann::ordered_json;
using Row = std::vector<std::string>;

std::string render_table(const Row& header, const std::vector<Row>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream os;
  const auto line = [&](const Row& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) os << "  ";
      if (c + 1 == r.size()) {
        os << r[c];
      } else {
        os << r[c] << std::string(width[c] - r[c].size(), ' ');
      }
    }
    os << '\n';
  };
  line(header);
  Row rule;
  for (std::size_t w : width) rule.push_back(std::string(w, '-'));
  line(rule);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::string render_csv(const Row& header, const std::vector<Row>& rows) {
  std::ostringstream os;
  const auto line = [&](const Row& r) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

/// Two-column field/value layout used by every scalar report.
std::string render_fields(const std::vector<std::pair<std::string, std::string>>& fields, ReportFormat format) {
  std::vector<Row> rows;
  for (const auto& [k, v] : fields) rows.push_back({k, v});
  return format == ReportFormat::csv ? render_csv({"field", "value"}, rows) : render_table({"field", "value"}, rows);
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("report json: ") + e.what());
  }
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("report json: ") + e.what());
  }
}

std::vector<std::string> param_names(std::string_view bound) {
  if (bound == "general") return {"v", "s"};
  if (bound == "iid") return {"z"};
  if (bound == "randomized") return {"alpha"};
  if (bound == "functional-sum") return {"t"};
  return {};
}

}  // namespace

std::string format12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  if (text == "table") return ReportFormat::table;
  throw ConfigError("unknown format '" + std::string(text) + "' (expected json, csv or table)");
}

std::string emit_report(const BoundReport& r, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["threshold"] = r.threshold;
    j["probability_bound"] = r.probability_bound;
    j["constants"] = Json::object();
    for (const auto& [k, v] : r.constants) j["constants"][k] = v;
    j["regime"] = std::string(to_string(r.regime));
    return dump(j);
  }
  std::vector<std::pair<std::string, std::string>> f{{"threshold", format12(r.threshold)},
                                                     {"probability_bound", format12(r.probability_bound)},
                                                     {"regime", std::string(to_string(r.regime))}};
  for (const auto& [k, v] : r.constants) f.emplace_back(k, format12(v));
  return render_fields(f, format);
}

std::string emit_report(const NvSolution& r, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["value"] = r.value;
    j["maximizer"] = r.maximizer;
    j["multiplier"] = r.multiplier;
    j["active"] = r.active;
    j["budget"] = r.budget;
    j["fallback"] = r.fallback;
    return dump(j);
  }
  std::string b;
  for (std::size_t i = 0; i < r.maximizer.size(); ++i) b += (i ? " " : "") + format12(r.maximizer[i]);
  return render_fields({{"value", format12(r.value)},
                        {"maximizer", b},
                        {"multiplier", format12(r.multiplier)},
                        {"active", bool_text(r.active)},
                        {"budget", format12(r.budget)},
                        {"fallback", bool_text(r.fallback)}},
                       format);
}

std::string emit_report(const NormEstimate& r, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["value"] = r.value;
    j["method"] = std::string(to_string(r.method));
    if (r.search_range) {
      j["search_range"] = {r.search_range->lo, r.search_range->hi};
    } else {
      j["search_range"] = nullptr;
    }
    j["argmax"] = r.argmax;
    j["caveat"] = r.caveat;
    return dump(j);
  }
  std::vector<std::pair<std::string, std::string>> f{{"value", format12(r.value)},
                                                     {"method", std::string(to_string(r.method))}};
  if (r.search_range) f.emplace_back("search_range", format12(r.search_range->lo) + " " + format12(r.search_range->hi));
  f.emplace_back("argmax", format12(r.argmax));
  if (!r.caveat.empty()) f.emplace_back("caveat", r.caveat);
  return render_fields(f, format);
}

std::string emit_report(const CheckReport& r, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["passed"] = r.passed;
    j["detail"] = r.detail;
    return dump(j);
  }
  return render_fields(
      {{"lhs", format12(r.lhs)}, {"rhs", format12(r.rhs)}, {"passed", bool_text(r.passed)}, {"detail", r.detail}}, format);
}

std::string emit_report(const ValidationReport& r, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["all_passed"] = r.all_passed();
    j["checks"] = Json::array();
    for (const auto& c : r.checks) {
      j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"witness", c.witness}, {"statistic", c.statistic}});
    }
    return dump(j);
  }
  std::vector<Row> rows;
  for (const auto& c : r.checks) rows.push_back({c.name, bool_text(c.passed), format12(c.statistic), c.witness});
  const Row header{"property", "passed", "statistic", "witness"};
  return format == ReportFormat::csv ? render_csv(header, rows) : render_table(header, rows);
}

std::string emit_report(const RandomizedCampaign& r, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["alpha"] = r.alpha;
    j["C"] = r.C;
    j["mode"] = std::string(to_string(r.mode));
    j["violations"] = r.violations;
    j["trials"] = r.trials;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    j["mean_thresholds"] = {{"randomized", r.mean_randomized_threshold}, {"classical", r.classical_threshold}};
    j["n_summands"] = r.n_summands;
    j["tau"] = r.tau;
    j["mean_difference"] = r.mean_difference;
    j["difference_se"] = r.difference_se;
    j["expected_difference"] = r.expected_difference;
    return dump(j);
  }
  return render_fields({{"alpha", format12(r.alpha)},
                        {"C", format12(r.C)},
                        {"mode", std::string(to_string(r.mode))},
                        {"violations", std::to_string(r.violations)},
                        {"trials", std::to_string(r.trials)},
                        {"rate", format12(r.rate())},
                        {"ci_low", format12(r.ci_low)},
                        {"ci_high", format12(r.ci_high)},
                        {"mean_randomized_threshold", format12(r.mean_randomized_threshold)},
                        {"classical_threshold", format12(r.classical_threshold)},
                        {"n_summands", std::to_string(r.n_summands)},
                        {"tau", format12(r.tau)},
                        {"mean_difference", format12(r.mean_difference)},
                        {"difference_se", format12(r.difference_se)},
                        {"expected_difference", format12(r.expected_difference)}},
                       format);
}

std::string emit_report(const MarkovCheck& r, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["lhs_se"] = r.lhs_se;
    j["rhs_se"] = r.rhs_se;
    j["z"] = r.z;
    j["passed"] = r.passed;
    return dump(j);
  }
  return render_fields({{"lhs", format12(r.lhs)},
                        {"rhs", format12(r.rhs)},
                        {"lhs_se", format12(r.lhs_se)},
                        {"rhs_se", format12(r.rhs_se)},
                        {"z", format12(r.z)},
                        {"passed", bool_text(r.passed)}},
                       format);
}

std::string emit_report(const CampaignResult& r, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["bound"] = r.bound;
    j["model"] = r.model;
    j["trials"] = r.trials;
    j["constants"] = Json::object();
    for (const auto& [k, v] : r.constants) j["constants"][k] = v;
    j["points"] = Json::array();
    for (const auto& g : r.points) {
      Json p;
      p["params"] = Json::object();
      for (const auto& [k, v] : g.params) p["params"][k] = v;
      p["threshold"] = g.threshold;
      p["empirical_tail"] = g.tail.estimate;
      p["count"] = g.tail.count;
      p["n"] = g.tail.n;
      p["ci_low"] = g.tail.ci_low;
      p["ci_high"] = g.tail.ci_high;
      p["bound"] = g.bound;
      p["dominated"] = g.dominated;
      p["p_value"] = g.p_value;
      j["points"].push_back(std::move(p));
    }
    j["summary"] = {{"points", r.summary.points},
                    {"violations", r.summary.violations},
                    {"worst_margin", r.summary.worst_margin}};
    j["provenance"] = {{"seed", r.provenance.seed},
                       {"stream", r.provenance.stream},
                       {"config_hash", r.provenance.config_hash}};
    return dump(j);
  }
  Row header = param_names(r.bound);
  for (const char* h : {"threshold", "empirical_tail", "ci_low", "ci_high", "bound", "verdict", "p_value"}) header.push_back(h);
  const auto names = param_names(r.bound);
  std::vector<Row> rows;
  for (const auto& g : r.points) {
    Row row;
    for (const auto& name : names) {
      const auto it = g.params.find(name);
      row.push_back(it == g.params.end() ? "" : format12(it->second));
    }
    row.push_back(format12(g.threshold));
    row.push_back(format12(g.tail.estimate));
    row.push_back(format12(g.tail.ci_low));
    row.push_back(format12(g.tail.ci_high));
    row.push_back(format12(g.bound));
    row.push_back(g.dominated ? "dominated" : "violated");
    row.push_back(format12(g.p_value));
    rows.push_back(std::move(row));
  }
  return format == ReportFormat::csv ? render_csv(header, rows) : render_table(header, rows);
}

std::string emit_report(const Calibration& r, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j;
    j["constant"] = r.constant;
    j["value"] = r.value;
    j["at_cap"] = r.at_cap;
    j["grid"] = Json::array();
    for (const auto& params : r.grid) {
      Json p = Json::object();
      for (const auto& [k, v] : params) p[k] = v;
      j["grid"].push_back(std::move(p));
    }
    return dump(j);
  }
  return render_fields({{"constant", r.constant},
                        {"value", format12(r.value)},
                        {"at_cap", bool_text(r.at_cap)},
                        {"grid_points", std::to_string(r.grid.size())}},
                       format);
}

std::string emit_scalars(const Scalars& values, ReportFormat format) {
  if (format == ReportFormat::json) {
    Json j = Json::object();
    for (const auto& [k, v] : values) j[k] = v;
    return dump(j);
  }
  std::vector<std::pair<std::string, std::string>> f;
  for (const auto& [k, v] : values) f.emplace_back(k, format12(v));
  return render_fields(f, format);
}

BoundReport bound_report_from_json(std::string_view text) {
  const Json j = parse_json(text);
  return guarded([&] {
    BoundReport r;
    r.threshold = j.at("threshold").get<double>();
    r.probability_bound = j.at("probability_bound").get<double>();
    for (const auto& [k, v] : j.at("constants").items()) r.constants[k] = v.get<double>();
    const std::string regime = j.at("regime").get<std::string>();
    bool found = false;
    for (Regime g : {Regime::general, Regime::iid_orlicz, Regime::iid_quadratic, Regime::min_of_both}) {
      if (to_string(g) == regime) {
        r.regime = g;
        found = true;
      }
    }
    if (!found) throw ConfigError("report json: unknown regime '" + regime + "'");
    return r;
  });
}

CampaignResult campaign_result_from_json(std::string_view text) {
  const Json j = parse_json(text);
  return guarded([&] {
    CampaignResult r;
    r.bound = j.at("bound").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.trials = j.at("trials").get<std::int64_t>();
    for (const auto& [k, v] : j.at("constants").items()) r.constants[k] = v.get<double>();
    for (const auto& p : j.at("points")) {
      GridPoint g;
      for (const auto& [k, v] : p.at("params").items()) g.params[k] = v.get<double>();
      g.threshold = p.at("threshold").get<double>();
      g.tail.estimate = p.at("empirical_tail").get<double>();
      g.tail.count = p.at("count").get<std::int64_t>();
      g.tail.n = p.at("n").get<std::int64_t>();
      g.tail.ci_low = p.at("ci_low").get<double>();
      g.tail.ci_high = p.at("ci_high").get<double>();
      g.bound = p.at("bound").get<double>();
      g.dominated = p.at("dominated").get<bool>();
      g.p_value = p.at("p_value").get<double>();
      r.points.push_back(std::move(g));
    }
    const auto& s = j.at("summary");
    r.summary.points = s.at("points").get<std::int64_t>();
    r.summary.violations = s.at("violations").get<std::int64_t>();
    r.summary.worst_margin = s.at("worst_margin").get<double>();
    const auto& pv = j.at("provenance");
    r.provenance.seed = pv.at("seed").get<std::uint64_t>();
    r.provenance.stream = pv.at("stream").get<std::uint64_t>();
    r.provenance.config_hash = pv.at("config_hash").get<std::string>();
    return r;
  });
}

RandomizedCampaign randomized_campaign_from_json(std::string_view text) {
  const Json j = parse_json(text);
  return guarded([&] {
    RandomizedCampaign r;
    r.alpha = j.at("alpha").get<double>();
    r.C = j.at("C").get<double>();
    r.mode = parse_tau_mode(j.at("mode").get<std::string>());
    r.violations = j.at("violations").get<std::int64_t>();
    r.trials = j.at("trials").get<std::int64_t>();
    r.ci_low = j.at("ci_low").get<double>();
    r.ci_high = j.at("ci_high").get<double>();
    r.mean_randomized_threshold = j.at("mean_thresholds").at("randomized").get<double>();
    r.classical_threshold = j.at("mean_thresholds").at("classical").get<double>();
    r.n_summands = j.at("n_summands").get<int>();
    r.tau = j.at("tau").get<double>();
    r.mean_difference = j.at("mean_difference").get<double>();
    r.difference_se = j.at("difference_se").get<double>();
    r.expected_difference = j.at("expected_difference").get<double>();
    return r;
  });
}

}  // namespace phib
