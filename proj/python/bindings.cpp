#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "sifrian/adjoint.hpp"
#include "sifrian/data.hpp"
#include "sifrian/errors.hpp"
#include "sifrian/optimizer.hpp"
#include "sifrian/params_io.hpp"
#include "sifrian/sifrian.hpp"
#include "sifrian/verify.hpp"

namespace py = pybind11;
using namespace sifrian;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(const Vector& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::memcpy(a.mutable_data(), v.values().data(), v.size() * sizeof(double));
  return a;
}

py::array_t<double> to_numpy(const Matrix& m) {
  py::array_t<double> a({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::memcpy(a.mutable_data(), m.values().data(), m.size() * sizeof(double));
  return a;
}

Vector to_vector(const Array& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-d array");
  return Vector(std::vector<double>(a.data(), a.data() + a.size()));
}

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
  return Matrix::from_row_major(static_cast<std::size_t>(a.shape(0)),
                                static_cast<std::size_t>(a.shape(1)),
                                std::vector<double>(a.data(), a.data() + a.size()));
}

py::list matrices(const std::vector<Matrix>& ms) {
  py::list out;
  for (const Matrix& m : ms) out.append(to_numpy(m));
  return out;
}

py::list vectors(const std::vector<Vector>& vs) {
  py::list out;
  for (const Vector& v : vs) out.append(to_numpy(v));
  return out;
}

std::vector<Matrix> from_matrices(const std::vector<Array>& as) {
  std::vector<Matrix> out;
  for (const Array& a : as) out.push_back(to_matrix(a));
  return out;
}

std::vector<Vector> from_vectors(const std::vector<Array>& as) {
  std::vector<Vector> out;
  for (const Array& a : as) out.push_back(to_vector(a));
  return out;
}

// Forward pass plus the adjoint for one pattern.
struct Pass {
  ForwardState state;
  AdjointState adj;
  Direction grad;
};

Pass pass(const NetworkParams& p, const Array& x, const Array& d, const RegSchedule& s) {
  Pass r;
  r.state = forward(p, to_vector(x));
  r.adj = backprop(p, r.state, to_vector(d), s);
  r.grad = gradient(r.state, r.adj);
  return r;
}

py::list entries(const std::vector<SpectrumEntry>& es) {
  py::list out;
  for (const SpectrumEntry& e : es) out.append(py::make_tuple(e.layer, e.eigenvalue, e.multiplicity));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the sifrian package";
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<NetworkParams>(m, "Params")
      .def_readonly("sizes", &NetworkParams::sizes)
      .def_readonly("white_layers", &NetworkParams::white_layers)
      .def_property(
          "weights", [](const NetworkParams& p) { return matrices(p.weights); },
          [](NetworkParams& p, const std::vector<Array>& w) {
            NetworkParams q = p;
            q.weights = from_matrices(w);
            q.validate();
            p = std::move(q);
          })
      .def_property(
          "biases", [](const NetworkParams& p) { return vectors(p.biases); },
          [](NetworkParams& p, const std::vector<Array>& b) {
            NetworkParams q = p;
            q.biases = from_vectors(b);
            q.validate();
            p = std::move(q);
          })
      .def_property_readonly("activation",
                             [](const NetworkParams& p) { return p.activation.name(); })
      .def_property_readonly("layers", &NetworkParams::layers)
      .def_property_readonly("parameter_count", &NetworkParams::parameter_count)
      .def("copy", [](const NetworkParams& p) { return p; })
      .def("__eq__", [](const NetworkParams& a, const NetworkParams& b) { return a == b; });

  py::class_<RegSchedule>(m, "Schedule")
      .def(py::init([](std::vector<double> lambdas, double lambda_out, double mu) {
             RegSchedule s;
             s.lambdas = std::move(lambdas);
             s.lambda_out = lambda_out;
             s.mu = mu;
             return s;
           }),
           py::arg("lambdas"), py::arg("lambda_out") = 1.0, py::arg("mu") = 0.0)
      .def_static("plain", &RegSchedule::plain, py::arg("layers"))
      .def_static("uniform", &RegSchedule::uniform, py::arg("layers"), py::arg("lam"),
                  py::arg("lambda_out") = 1.0)
      .def_readwrite("lambdas", &RegSchedule::lambdas)
      .def_readwrite("lambda_out", &RegSchedule::lambda_out)
      .def_readwrite("mu", &RegSchedule::mu);

  py::class_<Direction>(m, "Direction")
      .def_property_readonly("weights", [](const Direction& d) { return matrices(d.weights); })
      .def_property_readonly("biases", [](const Direction& d) { return vectors(d.biases); })
      .def("flatten",
           [](const Direction& d) { return to_numpy(Vector(d.flatten())); },
           "Coordinates as (vec W(1), ..., vec W(n), beta(1), ..., beta(n)), vec stacking columns.")
      .def_static("unflatten",
                  [](const NetworkParams& like, const Array& c) {
                    return Direction::unflatten(like, to_vector(c).span());
                  })
      .def("dot", [](const Direction& a, const Direction& b) { return dot(a, b); });

  m.def(
      "init",
      [](const std::vector<std::size_t>& sizes, const std::string& activation, double slope,
         std::uint64_t seed, bool white_layer) {
        NetworkParams p = init(sizes, Activation::parse(activation, slope), seed);
        return white_layer ? add_white_layer(p) : p;
      },
      py::arg("sizes"), py::arg("activation") = "leaky-relu", py::arg("slope") = 0.01,
      py::arg("seed") = 0, py::arg("white_layer") = false);

  m.def(
      "forward",
      [](const NetworkParams& p, const Array& x) { return vectors(forward(p, to_vector(x)).acts); },
      "Activations x(1)..x(n) of one pattern.", py::arg("params"), py::arg("x"));
  m.def(
      "predict", [](const NetworkParams& p, const Array& x) { return to_numpy(predict(p, to_vector(x))); },
      py::arg("params"), py::arg("x"));

  m.def(
      "gradient",
      [](const NetworkParams& p, const Array& x, const Array& d, const RegSchedule& s) {
        return pass(p, x, d, s).grad;
      },
      py::arg("params"), py::arg("x"), py::arg("d"), py::arg("schedule"));
  m.def(
      "hvp",
      [](const NetworkParams& p, const Array& x, const Array& d, const RegSchedule& s,
         const Direction& dir) {
        const Pass r = pass(p, x, d, s);
        return hvp(p, r.state, r.adj, dir, s);
      },
      py::arg("params"), py::arg("x"), py::arg("d"), py::arg("schedule"), py::arg("direction"));
  m.def(
      "dense_hessian",
      [](const NetworkParams& p, const Array& x, const Array& d, const RegSchedule& s) {
        const Pass r = pass(p, x, d, s);
        return to_numpy(dense_hessian(p, r.state, r.adj, s));
      },
      py::arg("params"), py::arg("x"), py::arg("d"), py::arg("schedule"));
  m.def(
      "newton_exact",
      [](const NetworkParams& p, const Array& x, const Array& d, const RegSchedule& s) {
        const Pass r = pass(p, x, d, s);
        return newton_exact(r.state, r.adj, s);
      },
      py::arg("params"), py::arg("x"), py::arg("d"), py::arg("schedule"));
  m.def(
      "mk_direction",
      [](const NetworkParams& p, const Array& x, const Array& d, const RegSchedule& s) {
        const Pass r = pass(p, x, d, s);
        return mk_direction(r.state, r.adj, r.grad, s);
      },
      py::arg("params"), py::arg("x"), py::arg("d"), py::arg("schedule"));
  m.def(
      "mk_damped",
      [](const NetworkParams& p, const Array& x, const Array& d, const RegSchedule& s) {
        const Pass r = pass(p, x, d, s);
        return mk_damped(r.state, r.adj, r.grad, s);
      },
      py::arg("params"), py::arg("x"), py::arg("d"), py::arg("schedule"));
  m.def(
      "spectral_schedule",
      [](const NetworkParams& p, const Array& x, const Array& d) {
        const ForwardState st = forward(p, to_vector(x));
        return spectral_schedule(st, unregularized_adjoint(p, st, to_vector(d)));
      },
      py::arg("params"), py::arg("x"), py::arg("d"));
  m.def(
      "closed_form_spectrum",
      [](const NetworkParams& p, const Array& x, const Array& d, const RegSchedule& s) {
        const Pass r = pass(p, x, d, s);
        const SpectrumReport rep = closed_form_spectrum(r.state, r.adj, s);
        py::dict out;
        out["family_a"] = entries(rep.family_a);
        out["family_b"] = entries(rep.family_b);
        out["radius"] = rep.radius;
        return out;
      },
      "Eigenvalue families as (layer, eigenvalue, multiplicity) tuples plus the radius.",
      py::arg("params"), py::arg("x"), py::arg("d"), py::arg("schedule"));

  m.def(
      "train_step",
      [](NetworkParams& p, const Array& x, const Array& d, const std::string& kind,
         const std::string& mode, const RegSchedule* fixed, double lr, double step_scale) {
        StepOptions opt;
        opt.kind = parse_direction_kind(kind);
        if (mode == "fixed") opt.mode = LambdaMode::fixed;
        else if (mode != "spectral") throw Error("mode must be 'spectral' or 'fixed'");
        if (fixed) opt.fixed = *fixed;
        else if (opt.mode == LambdaMode::fixed) throw Error("fixed mode needs a schedule");
        opt.lr = lr;
        opt.step_scale = step_scale;
        const StepReport r = train_step(p, to_vector(x), to_vector(d), opt);
        py::dict out;
        out["kind"] = to_string(r.kind);
        out["inner_product"] = r.inner_product;
        out["hessian_radius"] = r.hessian_radius;
        out["cost_before"] = r.cost_before;
        out["cost_after"] = r.cost_after;
        return out;
      },
      "Updates params in place and reports the step.", py::arg("params"), py::arg("x"),
      py::arg("d"), py::arg("kind") = "sgd", py::arg("mode") = "spectral",
      py::arg("schedule") = nullptr, py::arg("lr") = 0.01, py::arg("step_scale") = 1.0);

  m.def(
      "parse_idx_images",
      [](const py::bytes& b) {
        const std::string s = b;
        const RawImages img = parse_idx_images(std::vector<std::uint8_t>(s.begin(), s.end()));
        py::array_t<std::uint8_t> a({static_cast<py::ssize_t>(img.count()),
                                     static_cast<py::ssize_t>(img.rows),
                                     static_cast<py::ssize_t>(img.cols)});
        std::memcpy(a.mutable_data(), img.pixels.data(), img.pixels.size());
        return a;
      },
      py::arg("data"));
  m.def(
      "parse_idx_labels",
      [](const py::bytes& b) {
        const std::string s = b;
        const auto labels = parse_idx_labels(std::vector<std::uint8_t>(s.begin(), s.end()));
        py::array_t<std::uint8_t> a(static_cast<py::ssize_t>(labels.size()));
        std::memcpy(a.mutable_data(), labels.data(), labels.size());
        return a;
      },
      py::arg("data"));

  m.def("save_params", &save_params, py::arg("params"), py::arg("path"));
  m.def("load_params", &load_params, py::arg("path"));

  m.def(
      "verify",
      [](std::uint64_t seed, std::size_t samples) {
        VerifyOptions opt;
        opt.seed = seed;
        opt.samples = samples;
        py::list out;
        for (const CheckResult& c : run_verify(opt)) {
          py::dict r;
          r["name"] = c.name;
          r["measured"] = c.measured;
          r["tolerance"] = c.tolerance;
          r["passed"] = c.passed;
          r["gating"] = c.gating;
          out.append(r);
        }
        return out;
      },
      "Runs the seeded self-check suite and returns one dict per check.", py::arg("seed") = 0,
      py::arg("samples") = 20);
}
