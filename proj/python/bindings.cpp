#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "collmem/alias_index.hpp"
#include "collmem/clustering.hpp"
#include "collmem/contingency.hpp"
#include "collmem/corpus_io.hpp"
#include "collmem/features.hpp"
#include "collmem/memory_model.hpp"
#include "collmem/nonparametric.hpp"
#include "collmem/pipeline.hpp"
#include "collmem/regression.hpp"
#include "collmem/scanner.hpp"
#include "collmem/series.hpp"
#include "collmem/synth.hpp"

namespace py = pybind11;
using namespace collmem;

namespace {

ModelId model_or_throw(const std::string& name) {
  auto id = parse_model_id(name);
  if (!id) throw py::value_error("unknown model '" + name + "'");
  return *id;
}

py::dict fit_dict(const MemoryModelFit& f) {
  py::dict d;
  const auto& info = model_info(f.model);
  d["model"] = std::string(info.name);
  d["formula"] = std::string(info.formula);
  py::dict params;
  for (std::size_t i = 0; i < f.params.size(); ++i) params[py::str(std::string(info.param_names[i]))] = f.params[i];
  d["params"] = params;
  d["sse_log"] = f.sse_log;
  d["r2_log"] = f.r2_log;
  d["converged"] = f.converged;
  return d;
}

MentionSeries series_from(const std::vector<double>& values, SeriesKind kind) {
  if (values.size() != static_cast<std::size_t>(kSeriesLength))
    throw py::value_error("series must hold " + std::to_string(kSeriesLength) + " values (days " +
                          std::to_string(kSeriesFirst) + ".." + std::to_string(kSeriesLast) + ")");
  MentionSeries s;
  s.values = values;
  s.kind = kind;
  return s;
}

py::dict cluster_dict(const ClusterResult& r) {
  py::dict d;
  d["k"] = r.k;
  d["labels"] = r.labels;
  d["sizes"] = r.sizes;
  d["centroids"] = r.centroids;
  d["sse"] = r.sse;
  d["mean_silhouette"] = r.mean_silhouette;
  return d;
}

Medium medium_or_throw(const std::string& s) {
  auto m = parse_medium(s);
  if (!m) throw py::value_error("medium must be 'news' or 'twitter'");
  return *m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Post-mortem mention series: memory-curve fits, curve features, clustering and statistics.";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_RuntimeError);

  m.attr("SERIES_FIRST_DAY") = kSeriesFirst;
  m.attr("SERIES_LAST_DAY") = kSeriesLast;

  py::class_<ShiftedPowerLawParams>(m, "ShiftedPowerLaw")
      .def(py::init([](double a, double b, double c) { return ShiftedPowerLawParams{a, b, c}; }), py::arg("a"),
           py::arg("b"), py::arg("c"))
      .def_readwrite("a", &ShiftedPowerLawParams::a)
      .def_readwrite("b", &ShiftedPowerLawParams::b)
      .def_readwrite("c", &ShiftedPowerLawParams::c)
      .def_static("published_news", &ShiftedPowerLawParams::published_news)
      .def_static("published_twitter", &ShiftedPowerLawParams::published_twitter)
      .def("decompose",
           [](const ShiftedPowerLawParams& p, double t) {
             auto d = decompose(p, t);
             return py::dict(py::arg("u") = d.u, py::arg("v") = d.v,
                             py::arg("communicative_share") = d.communicative_share);
           })
      .def("crossover_time", &crossover_time)
      .def("quantile_time", &quantile_time, py::arg("q"))
      .def("__repr__", [](const ShiftedPowerLawParams& p) {
        std::ostringstream s;
        s << "ShiftedPowerLaw(a=" << p.a << ", b=" << p.b << ", c=" << p.c << ")";
        return s.str();
      });

  m.def("model_names", [] {
    std::vector<std::string> out;
    for (auto id : default_catalog()) out.emplace_back(model_info(id).name);
    return out;
  });
  m.def(
      "eval_model",
      [](const std::string& model, const std::vector<double>& params, double t) {
        return eval_model(model_or_throw(model), params, t);
      },
      py::arg("model"), py::arg("params"), py::arg("t"));
  m.def(
      "fit_model",
      [](const std::string& model, const std::vector<double>& curve, int t_first) {
        FitOptions o;
        o.t_first = t_first;
        py::gil_scoped_release release;
        auto f = fit_model(model_or_throw(model), curve, o);
        py::gil_scoped_acquire acquire;
        return fit_dict(f);
      },
      py::arg("model"), py::arg("curve"), py::arg("t_first") = 1,
      "Fit log10(model) to a mean log curve given for days t_first, t_first+1, ...");
  m.def(
      "compare_models",
      [](const std::vector<double>& curve, std::vector<std::string> models) {
        std::vector<ModelId> ids;
        if (models.empty()) ids = default_catalog();
        for (const auto& name : models) ids.push_back(model_or_throw(name));
        ModelComparison cmp;
        {
          py::gil_scoped_release release;
          cmp = compare_models(ids, curve);
        }
        py::list out;
        for (const auto& f : cmp.ranked) out.append(fit_dict(f));
        return out;
      },
      py::arg("curve"), py::arg("models") = std::vector<std::string>{});

  m.def("supersmooth", [](const std::vector<double>& y) { return supersmooth(std::span<const double>(y)); });
  m.def(
      "extract_features",
      [](const std::vector<double>& raw, const std::vector<double>& smoothed) {
        auto f = extract_features(series_from(raw, SeriesKind::Raw), series_from(smoothed, SeriesKind::Smoothed));
        return py::dict(py::arg("pre_mean") = f.pre_mortem_mean, py::arg("short_boost") = f.short_term_boost,
                        py::arg("long_boost") = f.long_term_boost, py::arg("halving_time") = f.halving_time);
      },
      py::arg("raw"), py::arg("smoothed"),
      "Features of one person's raw and smoothed log series on days -360..400.");
  m.def("halving_time", [](const std::vector<double>& post) { return halving_time(std::span<const double>(post)); });

  m.def(
      "kmeans",
      [](const Eigen::MatrixXd& x, int k, std::uint64_t seed, int restarts) {
        KMeansOptions o;
        o.restarts = restarts;
        ClusterResult r;
        {
          py::gil_scoped_release release;
          r = kmeans(x, k, seed, o);
        }
        return cluster_dict(r);
      },
      py::arg("x"), py::arg("k"), py::arg("seed") = 1, py::arg("restarts") = 50);
  m.def(
      "select_k",
      [](const Eigen::MatrixXd& x, int k_min, int k_max, std::uint64_t seed, int restarts) {
        KMeansOptions o;
        o.restarts = restarts;
        KSelection s;
        {
          py::gil_scoped_release release;
          s = select_k(x, k_min, k_max, seed, o);
        }
        py::dict d = cluster_dict(s.best);
        d["best_k"] = s.best_k;
        d["curve"] = s.curve;
        return d;
      },
      py::arg("x"), py::arg("k_min") = 2, py::arg("k_max") = 30, py::arg("seed") = 1, py::arg("restarts") = 50);
  m.def(
      "mean_silhouette",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels) { return mean_silhouette(x, labels); },
      py::arg("x"), py::arg("labels"));

  m.def("trace_bounds", [](const Marginals& r, const Marginals& c) {
    auto b = trace_bounds(r, c);
    return std::make_pair(b.min, b.max);
  });
  m.def("expected_trace", &expected_trace);
  m.def("chi2_independence", [](const std::vector<std::vector<std::int64_t>>& table) {
    auto c = chi2_independence(ConfusionMatrix{table});
    return py::dict(py::arg("statistic") = c.statistic, py::arg("dof") = c.dof, py::arg("p") = c.p);
  });
  m.def(
      "proportions_test",
      [](std::int64_t x, std::int64_t n, double p0) {
        auto c = proportions_test(x, n, p0);
        return py::dict(py::arg("statistic") = c.statistic, py::arg("dof") = c.dof, py::arg("p") = c.p);
      },
      py::arg("successes"), py::arg("trials"), py::arg("p0"));

  m.def("rank_scale", [](const std::vector<double>& v) { return rank_scale(v); });
  m.def("wilcoxon_signed_rank", [](const std::vector<double>& d) {
    auto r = wilcoxon_signed_rank(d);
    return py::dict(py::arg("W") = r.w, py::arg("p") = r.p, py::arg("n") = r.n, py::arg("exact") = r.exact);
  });
  m.def(
      "bootstrap_median_ci",
      [](const std::vector<double>& v, int replicates, std::uint64_t seed, double level) {
        py::gil_scoped_release release;
        auto i = bootstrap_median_ci(v, replicates, seed, level);
        return std::make_pair(i.lo, i.hi);
      },
      py::arg("values"), py::arg("replicates") = 10000, py::arg("seed") = 1, py::arg("level") = 0.95);
  m.def(
      "ols_fit",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> names) {
        auto f = ols_fit(x, y, std::move(names));
        py::dict d;
        d["names"] = f.names;
        d["beta"] = f.beta;
        d["se"] = f.se;
        d["p"] = f.p;
        d["r2"] = f.r2;
        d["adj_r2"] = f.adj_r2;
        d["rmse"] = f.rmse;
        d["f_statistic"] = f.f_statistic;
        d["f_p"] = f.f_p;
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("names") = std::vector<std::string>{});
  m.def("multiplicative_effect", &multiplicative_effect);

  py::class_<AliasIndex>(m, "AliasIndex")
      .def(py::init([](const std::string& registry_json, double threshold) {
             std::istringstream in(registry_json);
             auto persons = read_registry(in);
             return AliasIndex::build(persons, threshold);
           }),
           py::arg("registry_json"), py::arg("threshold") = AliasIndex::kDefaultThreshold)
      .def_property_readonly("excluded", &AliasIndex::excluded)
      .def(
          "mentions",
          [](const AliasIndex& idx, const std::string& medium, const std::string& title, const std::string& body) {
            Document d;
            d.medium = medium_or_throw(medium);
            d.title = title;
            d.body = body;
            return mentioned_ids(d, idx);
          },
          py::arg("medium"), py::arg("title"), py::arg("body"),
          "Person ids mentioned by one document under the rule of its medium.");

  m.def(
      "generate_series",
      [](const ShiftedPowerLawParams& p, double sigma, std::uint64_t seed) {
        return generate_series(p, sigma, seed).values;
      },
      py::arg("params"), py::arg("sigma") = 0.0, py::arg("seed") = 1,
      "Raw log series on days -360..400 following the shifted power law.");

  m.def(
      "run",
      [](const std::string& command, const std::map<std::string, std::string>& options) {
        RunConfig cfg;
        for (const auto& [key, value] : options) {
          if (key == "docs") cfg.docs = value;
          else if (key == "registry") cfg.registry = value;
          else if (key == "counts") cfg.counts_dir = value;
          else if (key == "missing_days") cfg.missing_days = value;
          else if (key == "series") cfg.series = value;
          else if (key == "features") cfg.features = value;
          else if (key == "out") cfg.out_dir = value;
          else if (key == "seed") cfg.seed = std::stoull(value);
          else if (key == "restarts") cfg.restarts = std::stoi(value);
          else if (key == "k_max") cfg.k_max = std::stoi(value);
          else if (key == "bootstrap") cfg.bootstrap_replicates = std::stoi(value);
          else if (key == "medium") cfg.media = {medium_or_throw(value)};
          else throw py::value_error("unknown option '" + key + "'");
          cfg.overrides.push_back(key);
        }
        py::gil_scoped_release release;
        run_command(command, cfg);
      },
      py::arg("command"), py::arg("options") = std::map<std::string, std::string>{},
      "Run one pipeline command; options mirror the command-line flags.");
}
