#include "hjb/assembly.hpp"

#include <cmath>
#include <sstream>

#include "hjb/errors.hpp"

namespace hjb {

ConstraintSystem assemble(const ControlProblem& problem,
                          const FeatureBasis& basis, const SampleSet& samples,
                          double eta, ObjectiveMode mode) {
  if (std::abs(basis.horizon() - problem.T) > 1e-12 * problem.T)
    throw ParameterError("assemble: basis horizon differs from problem horizon");
  if (basis.dim() != problem.d)
    throw ParameterError("assemble: basis dimension differs from state dimension");
  if (!(eta >= 0.0)) throw ParameterError("assemble: eta must be >= 0");
  const int n = samples.size();
  if (n < 1) throw ParameterError("assemble: empty sample set");
  const int m = basis.m();

  ConstraintSystem cs;
  cs.A.resize(n, m);
  cs.b.resize(n);
  cs.c = Vec::Zero(m);
  cs.C = 0.0;
  cs.eta = eta;

  for (int i = 0; i < n; ++i) {
    const Sample& s = samples.triples[i];
    if (s.x.size() != problem.d || s.u.size() != problem.p) {
      std::ostringstream os;
      os << "assemble: sample " << i << " has wrong dimensions";
      throw AssemblyError(os.str(), i);
    }
    const Vec f = problem.dynamics(s.t, s.x, s.u);
    const Vec gradM = problem.terminal.grad(s.x);
    if (f.size() != problem.d || gradM.size() != problem.d) {
      std::ostringstream os;
      os << "assemble: callback returned wrong size at sample " << i;
      throw AssemblyError(os.str(), i);
    }
    cs.b(i) = problem.running_cost(s.t, s.x, s.u) + gradM.dot(f) +
              eta * problem.terminal.laplacian(s.x);
    Vec a = basis.psi_jac_x(s.t, s.x) * f + basis.psi_dt(s.t, s.x);
    if (eta != 0.0) a += eta * basis.psi_laplacian(s.t, s.x);
    cs.A.row(i) = a.transpose();

    const double t_obj = mode == ObjectiveMode::all_samples ? s.t : 0.0;
    cs.c += basis.psi(t_obj, s.x);
    cs.C += problem.terminal.value(s.x);
  }
  cs.c /= n;
  cs.C /= n;
  return cs;
}

}  // namespace hjb
