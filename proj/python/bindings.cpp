#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gpdistill/continuous_bernoulli.hpp"
#include "gpdistill/errors.hpp"
#include "gpdistill/experiments.hpp"
#include "gpdistill/gpc_distill.hpp"
#include "gpdistill/gpr.hpp"
#include "gpdistill/gpr_distill.hpp"
#include "gpdistill/hyperopt.hpp"
#include "gpdistill/quadrature.hpp"
#include "gpdistill/toy_data.hpp"

namespace py = pybind11;
using namespace gpdistill;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// 1-d arrays are read as n points in one dimension.
Points as_points(const Array& a) {
  if (a.ndim() == 1) {
    Points p(a.shape(0), 1);
    for (py::ssize_t i = 0; i < a.shape(0); ++i) p(i, 0) = a.at(i);
    return p;
  }
  if (a.ndim() != 2) throw InvalidArgument("inputs must be a 1-d or 2-d array");
  Points p(a.shape(0), a.shape(1));
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t j = 0; j < a.shape(1); ++j) p(i, j) = a.at(i, j);
  return p;
}

DistillSchedule schedule_of(const std::vector<double>& gammas) {
  DistillSchedule s;
  s.gammas = gammas;
  return s;
}

Likelihood likelihood_of(const std::string& s) {
  if (s == "bernoulli") return Likelihood::bernoulli;
  if (s == "cb" || s == "continuous_bernoulli") return Likelihood::continuous_bernoulli;
  throw InvalidArgument("unknown likelihood '" + s + "'");
}

ProbabilityMethod method_of(const std::string& s) {
  if (s == "quadrature") return ProbabilityMethod::quadrature;
  if (s == "latent_mean") return ProbabilityMethod::latent_mean;
  throw InvalidArgument("unknown probability method '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(gpdistill, m) {
  m.doc() = "Self-distillation for Gaussian process regression and classification";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", error.ptr());
  static py::exception<ParseError> parse(m, "ParseError", error.ptr());
  static py::exception<NumericalError> numerical(m, "NumericalError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NumericalError& e) {
      std::string msg = e.what();
      if (e.step) msg += " [step " + std::to_string(*e.step) + "]";
      py::set_error(numerical, msg.c_str());
    } catch (const InvalidArgument& e) {
      py::set_error(invalid, e.what());
    } catch (const ParseError& e) {
      py::set_error(parse, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<KernelParams>(m, "KernelParams")
      .def(py::init([](double sv, double ls, double jitter) { return KernelParams{sv, ls, jitter}; }),
           py::arg("signal_variance") = 1.0, py::arg("length_scale") = 1.0, py::arg("jitter") = kDefaultJitter)
      .def_readwrite("signal_variance", &KernelParams::signal_variance)
      .def_readwrite("length_scale", &KernelParams::length_scale)
      .def_readwrite("jitter", &KernelParams::jitter)
      .def("scaled", &KernelParams::scaled)
      .def("__repr__", [](const KernelParams& p) {
        return "KernelParams(signal_variance=" + std::to_string(p.signal_variance) +
               ", length_scale=" + std::to_string(p.length_scale) + ", jitter=" + std::to_string(p.jitter) + ")";
      });

  m.def("gram", [](const Array& xs, const KernelParams& p, bool jitter) { return gram(as_points(xs), p, jitter).values; },
        py::arg("xs"), py::arg("params"), py::arg("add_jitter") = false);
  m.def("cross_gram", [](const Array& a, const Array& b, const KernelParams& p) {
    return cross_gram(as_points(a), as_points(b), p);
  });

  py::class_<Prediction>(m, "Prediction")
      .def_readonly("mean", &Prediction::mean)
      .def_readonly("cov", &Prediction::cov)
      .def("lower", &Prediction::lower)
      .def("upper", &Prediction::upper);

  py::class_<GprModel>(m, "GprModel")
      .def("predict", [](const GprModel& g, const Array& xs) { return g.predict(as_points(xs)); })
      .def("predict_mean", [](const GprModel& g, const Array& xs) { return g.predict_mean(as_points(xs)); })
      .def_property_readonly("alpha_weights", &GprModel::alpha_weights)
      .def_property_readonly("noise", &GprModel::noise)
      .def("log_marginal_likelihood", &GprModel::log_marginal_likelihood);

  m.def("fit_gpr", [](const Array& xs, const Eigen::VectorXd& ys, const KernelParams& p, double noise) {
    return fit_gpr(Dataset{as_points(xs), ys}, p, noise);
  }, py::arg("xs"), py::arg("ys"), py::arg("params"), py::arg("noise"));

  m.def("effective_noise", [](const std::vector<double>& gammas, std::size_t t) {
    const EffectiveNoise e = effective_noise(schedule_of(gammas), t);
    return py::make_tuple(e.gamma_minus, e.effective);
  }, py::arg("gammas"), py::arg("t"), "(gamma_minus, effective noise) after t distribution-centric steps");

  py::class_<DataCentricGpr>(m, "DataCentricGpr")
      .def(py::init([](const Array& xs, const Eigen::VectorXd& ys, const KernelParams& p,
                       const std::vector<double>& gammas, const std::string& path) {
             if (path != "spectral" && path != "naive") throw InvalidArgument("path must be 'spectral' or 'naive'");
             return DataCentricGpr(Dataset{as_points(xs), ys}, p, schedule_of(gammas),
                                   path == "naive" ? DataCentricPath::naive : DataCentricPath::spectral);
           }),
           py::arg("xs"), py::arg("ys"), py::arg("params"), py::arg("gammas"), py::arg("path") = "spectral")
      .def_property_readonly("steps", &DataCentricGpr::steps)
      .def("targets", &DataCentricGpr::targets, py::arg("t"))
      .def("predict", [](const DataCentricGpr& d, const Array& xs, std::size_t t) { return d.predict(as_points(xs), t); })
      .def("predict_mean",
           [](const DataCentricGpr& d, const Array& xs, std::size_t t) { return d.predict_mean(as_points(xs), t); });

  m.def("distribution_centric_closed_form",
        [](const Array& xs, const Eigen::VectorXd& ys, const KernelParams& p, const std::vector<double>& gammas,
           std::size_t t, const Array& test) {
          return distribution_centric_closed_form(Dataset{as_points(xs), ys}, p, schedule_of(gammas), t, as_points(test));
        },
        py::arg("xs"), py::arg("ys"), py::arg("params"), py::arg("gammas"), py::arg("t"), py::arg("test_xs"));
  m.def("distribution_centric_recursive",
        [](const Array& xs, const Eigen::VectorXd& ys, const KernelParams& p, const std::vector<double>& gammas,
           std::size_t t, const Array& test) {
          const auto chain = distribution_centric_recursive(Dataset{as_points(xs), ys}, p, schedule_of(gammas), t);
          const Points tx = as_points(test);
          return Prediction{chain.back().mean(tx), chain.back().covariance(tx)};
        },
        py::arg("xs"), py::arg("ys"), py::arg("params"), py::arg("gammas"), py::arg("t"), py::arg("test_xs"));

  m.def("cb_normalizer", &cb_normalizer, py::arg("lam"));
  m.def("cb_terms", [](double a) {
    const CbTerms t = cb_terms_at_latent(a);
    return py::make_tuple(t.log_c, t.dlog_c, t.d2log_c);
  }, py::arg("a"), "(log C, d log C / da, d2 log C / da2) at lambda = sigmoid(a)");
  m.def("cb_log_density", &cb_log_density, py::arg("x"), py::arg("lam"));
  m.def("sigmoid", &sigmoid);
  m.def("expected_sigmoid", &expected_sigmoid, py::arg("mean"), py::arg("variance"));

  py::class_<GpcModel>(m, "GpcModel")
      .def_property_readonly("f_hat", [](const GpcModel& g) { return g.fit().f_hat; })
      .def_property_readonly("w_diag", [](const GpcModel& g) { return g.fit().w_diag; })
      .def_property_readonly("iterations", [](const GpcModel& g) { return g.fit().iterations; })
      .def_property_readonly("psi_trace", [](const GpcModel& g) { return g.fit().psi_trace; })
      .def_property_readonly("targets", &GpcModel::targets)
      .def("predict_latent", [](const GpcModel& g, const Array& xs) { return g.predict_latent(as_points(xs)); })
      .def("predict_proba",
           [](const GpcModel& g, const Array& xs, const std::string& method) {
             return g.predict_proba(as_points(xs), method_of(method));
           },
           py::arg("xs"), py::arg("method") = "quadrature")
      .def("marginal_loglik", &GpcModel::marginal_loglik);

  m.def("fit_gpc",
        [](const Array& xs, const Eigen::VectorXd& ys, const KernelParams& p, const std::string& lik, double reg) {
          return fit_gpc(BinaryDataset{as_points(xs), ys}, p, likelihood_of(lik), reg);
        },
        py::arg("xs"), py::arg("ys"), py::arg("params"), py::arg("likelihood") = "bernoulli",
        py::arg("reg_gamma") = 0.0);
  m.def("data_centric_gpc",
        [](const Array& xs, const Eigen::VectorXd& ys, const KernelParams& p, int steps, const std::string& kind,
           const std::string& lik, std::optional<std::vector<double>> reg) {
          GpcDistillConfig cfg;
          cfg.steps = steps;
          cfg.target_kind = parse_target_kind(kind);
          cfg.distill_likelihood = likelihood_of(lik);
          cfg.reg_gammas = std::move(reg);
          return data_centric_gpc(BinaryDataset{as_points(xs), ys}, p, cfg).models;
        },
        py::arg("xs"), py::arg("ys"), py::arg("params"), py::arg("steps"), py::arg("target_kind") = "soft_mean",
        py::arg("likelihood") = "cb", py::arg("reg_gammas") = py::none());
  m.def("distribution_centric_gpc_iterated",
        [](const Array& xs, const Eigen::VectorXd& ys, const KernelParams& p, int steps) {
          return distribution_centric_gpc_iterated(BinaryDataset{as_points(xs), ys}, p, steps);
        },
        py::arg("xs"), py::arg("ys"), py::arg("params"), py::arg("steps"));
  m.def("distribution_centric_gpc_scaled",
        [](const Array& xs, const Eigen::VectorXd& ys, const KernelParams& p, int t) {
          return distribution_centric_gpc_scaled(BinaryDataset{as_points(xs), ys}, p, t);
        },
        py::arg("xs"), py::arg("ys"), py::arg("params"), py::arg("t"));
  m.def("approximation_error",
        [](const std::vector<GpcModel>& it, const std::vector<GpcModel>& sc, const Array& test, const std::string& method) {
          return approximation_error(it, sc, as_points(test), method_of(method));
        },
        py::arg("iterated"), py::arg("scaled"), py::arg("test_xs"), py::arg("method") = "quadrature");

  m.def("grid_search",
        [](const Array& xs, const Eigen::VectorXd& ys, std::vector<double> sf, std::vector<double> ls,
           std::optional<std::vector<double>> noise, const std::string& objective) {
          const GridResult r =
              grid_search(as_points(xs), ys, GridSpec{std::move(sf), std::move(ls), std::move(noise)}, parse_objective(objective));
          std::vector<double> nll;
          for (const auto& c : r.cells) nll.push_back(c.nll);
          py::dict best;
          best["sigma_f"] = r.best().sigma_f;
          best["length_scale"] = r.best().length_scale;
          best["noise"] = r.best().noise ? py::cast(*r.best().noise) : py::none();
          best["nll"] = r.best().nll;
          return py::make_tuple(best, nll);
        },
        py::arg("xs"), py::arg("ys"), py::arg("sigma_f_values"), py::arg("length_scale_values"),
        py::arg("noise_values") = py::none(), py::arg("objective") = "gpr_nll",
        "(best cell, flat NLL list with sigma_f outermost)");

  m.def("regression_toy", [](std::uint64_t seed, bool noiseless) {
    const Dataset d = regression_toy(seed, noiseless);
    return py::make_tuple(Eigen::VectorXd(d.xs.col(0)), d.ys);
  }, py::arg("seed"), py::arg("noiseless") = false);
  m.def("classification_toy", [](std::uint64_t seed, Eigen::Index n) {
    const ClassificationToy t = classification_toy(seed, n);
    return py::make_tuple(Eigen::VectorXd(t.data.xs.col(0)), t.data.ys, t.probabilities);
  }, py::arg("seed"), py::arg("n") = 30);

  m.def("experiment_ids", &experiment_ids);
  m.def("run_experiment", [](const std::string& id, const std::filesystem::path& out_dir, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.id = id;
    cfg.out_dir = out_dir;
    cfg.seed = seed;
    return run_experiment(cfg).files;
  }, py::arg("experiment"), py::arg("out_dir"), py::arg("seed") = 0);
}
