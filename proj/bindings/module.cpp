#include "rsp/baselines.hpp"
#include "rsp/clustering.hpp"
#include "rsp/metrics.hpp"
#include "rsp/rng.hpp"
#include "rsp/sensing.hpp"
#include "rsp/solver.hpp"
#include "rsp/svd.hpp"
#include "rsp/synth.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;

PYBIND11_MODULE(_rsp, m) {
  m.doc() = "Row space pursuit: compressive robust subspace clustering";

  py::class_<rsp::TruncatedSvd>(m, "TruncatedSvd")
      .def_readonly("left", &rsp::TruncatedSvd::left)
      .def_readonly("values", &rsp::TruncatedSvd::values)
      .def_readonly("right", &rsp::TruncatedSvd::right);

  py::class_<rsp::SensingMatrix>(m, "SensingMatrix")
      .def_readonly("matrix", &rsp::SensingMatrix::matrix)
      .def_readonly("seed", &rsp::SensingMatrix::seed)
      .def_property_readonly("p", &rsp::SensingMatrix::p)
      .def_property_readonly("m", &rsp::SensingMatrix::m);

  py::class_<rsp::SynConfig>(m, "SynConfig")
      .def(py::init([](rsp::Index ambient_dim, rsp::Index n_per_class, rsp::Index num_classes,
                       rsp::Index subspace_dim, double corruption_size, std::uint64_t seed) {
             rsp::SynConfig c;
             c.ambient_dim = ambient_dim;
             c.n_per_class = n_per_class;
             c.num_classes = num_classes;
             c.subspace_dim = subspace_dim;
             c.corruption_size = corruption_size;
             c.seed = seed;
             return c;
           }),
           py::arg("ambient_dim") = 200, py::arg("n_per_class") = 100, py::arg("num_classes") = 2,
           py::arg("subspace_dim") = 2, py::arg("corruption_size") = 0.0, py::arg("seed") = 0)
      .def_readwrite("ambient_dim", &rsp::SynConfig::ambient_dim)
      .def_readwrite("n_per_class", &rsp::SynConfig::n_per_class)
      .def_readwrite("num_classes", &rsp::SynConfig::num_classes)
      .def_readwrite("subspace_dim", &rsp::SynConfig::subspace_dim)
      .def_readwrite("corruption_size", &rsp::SynConfig::corruption_size)
      .def_readwrite("seed", &rsp::SynConfig::seed);

  py::class_<rsp::SynInstance>(m, "SynInstance")
      .def_readonly("clean", &rsp::SynInstance::clean)
      .def_readonly("corruption", &rsp::SynInstance::corruption)
      .def_readonly("observed", &rsp::SynInstance::observed)
      .def_readonly("labels", &rsp::SynInstance::labels)
      .def_readonly("true_rank", &rsp::SynInstance::true_rank)
      .def_readonly("corruption_count", &rsp::SynInstance::corruption_count)
      .def_readonly("config", &rsp::SynInstance::config);

  py::class_<rsp::RowSpaceBasis>(m, "RowSpaceBasis")
      .def(py::init<rsp::Matrix>(), py::arg("basis"))
      .def_readonly("basis", &rsp::RowSpaceBasis::basis)
      .def_property_readonly("points", &rsp::RowSpaceBasis::points)
      .def_property_readonly("rank", &rsp::RowSpaceBasis::rank);

  py::class_<rsp::RspParams>(m, "RspParams")
      .def(py::init([](rsp::Index rank, double lambda, int max_iters, double tol) {
             rsp::RspParams p;
             p.rank = rank;
             p.lambda = lambda;
             p.max_iters = max_iters;
             p.tol = tol;
             return p;
           }),
           py::arg("rank") = 2, py::arg("lambda_") = 1.0 / 128.0, py::arg("max_iters") = 1000,
           py::arg("tol") = 1e-6)
      .def_readwrite("rank", &rsp::RspParams::rank)
      .def_readwrite("lambda_", &rsp::RspParams::lambda)
      .def_readwrite("max_iters", &rsp::RspParams::max_iters)
      .def_readwrite("tol", &rsp::RspParams::tol);

  py::class_<rsp::RspSolution>(m, "RspSolution")
      .def_readonly("row_space", &rsp::RspSolution::row_space)
      .def_readonly("sparse", &rsp::RspSolution::sparse)
      .def_readonly("objective_trace", &rsp::RspSolution::objective_trace)
      .def_readonly("iterations", &rsp::RspSolution::iterations)
      .def_readonly("converged", &rsp::RspSolution::converged)
      .def_readonly("rho", &rsp::RspSolution::rho);

  py::class_<rsp::KMeansParams>(m, "KMeansParams")
      .def(py::init([](int restarts, int max_iters, double tol) {
             rsp::KMeansParams p;
             p.restarts = restarts;
             p.max_iters = max_iters;
             p.tol = tol;
             return p;
           }),
           py::arg("restarts") = 10, py::arg("max_iters") = 300, py::arg("tol") = 1e-9)
      .def_readwrite("restarts", &rsp::KMeansParams::restarts)
      .def_readwrite("max_iters", &rsp::KMeansParams::max_iters)
      .def_readwrite("tol", &rsp::KMeansParams::tol);

  py::class_<rsp::ClusterAssignment>(m, "ClusterAssignment")
      .def_readonly("labels", &rsp::ClusterAssignment::labels)
      .def_readonly("centroids", &rsp::ClusterAssignment::centroids)
      .def_readonly("inertia", &rsp::ClusterAssignment::inertia)
      .def_readonly("restarts_used", &rsp::ClusterAssignment::restarts_used);

  py::class_<rsp::RecoveryReport>(m, "RecoveryReport")
      .def_readonly("snr_db", &rsp::RecoveryReport::snr_db)
      .def_readonly("score", &rsp::RecoveryReport::score)
      .def_readonly("corruption_size", &rsp::RecoveryReport::corruption_size)
      .def_readonly("support_precision", &rsp::RecoveryReport::support_precision)
      .def_readonly("support_recall", &rsp::RecoveryReport::support_recall);

  m.def("shrink", &rsp::shrink, py::arg("a"), py::arg("tau"),
        "Entry-wise soft threshold sign(x) * max(|x| - tau, 0)");
  m.def("matmul", &rsp::matmul, py::arg("a"), py::arg("b"));
  m.def("frobenius_norm", &rsp::frobenius_norm, py::arg("a"));
  m.def("operator_norm", &rsp::operator_norm, py::arg("a"));
  m.def("truncated_svd", &rsp::truncated_svd, py::arg("a"), py::arg("rank"));
  m.def("make_sensing", &rsp::make_sensing, py::arg("p"), py::arg("m"), py::arg("seed"));
  m.def("compress", &rsp::compress, py::arg("sensing"), py::arg("x"));
  m.def("generate", &rsp::generate, py::arg("config"));
  m.def(
      "solve",
      [](const rsp::Matrix& m_mat, const rsp::SensingMatrix& sensing, const rsp::RspParams& params,
         std::optional<rsp::Matrix> s_init) {
        return rsp::solve(m_mat, sensing, params, s_init ? &*s_init : nullptr);
      },
      py::arg("m_mat"), py::arg("sensing"), py::arg("params"), py::arg("s_init") = py::none());
  m.def("objective", &rsp::objective, py::arg("m_mat"), py::arg("sensing"), py::arg("v"),
        py::arg("s"), py::arg("lambda_"));
  m.def("gradient_s", &rsp::gradient_s, py::arg("m_mat"), py::arg("sensing"), py::arg("v"),
        py::arg("s"));
  m.def("update_v", &rsp::update_v, py::arg("m_mat"), py::arg("sensing"), py::arg("s"),
        py::arg("rank"));
  m.def("update_s", &rsp::update_s, py::arg("s"), py::arg("grad"), py::arg("lambda_"),
        py::arg("rho"));
  m.def("kmeans", &rsp::kmeans, py::arg("points"), py::arg("k"), py::arg("seed"),
        py::arg("params") = rsp::KMeansParams{});
  m.def("accuracy", &rsp::accuracy, py::arg("predicted"), py::arg("truth"));
  m.def("cluster_compressed", &rsp::cluster_compressed, py::arg("m_mat"), py::arg("sensing"),
        py::arg("k"), py::arg("params"), py::arg("normalize"), py::arg("seed"));
  m.def("sim_rowspace", &rsp::sim_rowspace, py::arg("m_mat"), py::arg("rank"));
  m.def("pca_rowspace", &rsp::pca_rowspace, py::arg("m_mat"), py::arg("rank"));
  m.def("projector_snr", &rsp::projector_snr, py::arg("v_true"), py::arg("v_est"));
  m.def("score_of_snr", &rsp::score_of_snr, py::arg("snr_db"));
  m.def("support_metrics", &rsp::support_metrics, py::arg("s_true"), py::arg("s_est"),
        py::arg("threshold"));
  m.def("make_recovery_report", &rsp::make_recovery_report, py::arg("v_true"), py::arg("v_est"),
        py::arg("s_true"), py::arg("s_est"));
  m.def("derive_seed", [](std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return rsp::derive_seed(base, a, b);
  });

  m.attr("__version__") = "1.0.0";
}
