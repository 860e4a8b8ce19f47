// Walks the exemplar Phi(z) = [[0, z], [1, 0]] on the parabola w^2 = z
// through the whole pipeline and prints what each step finds.

#include <fstream>
#include <iostream>

#include "isopair_lab/isopair_lab.hpp"

using namespace isopair_lab;

int main(int argc, char **argv) {
  const auto c = colligation::corpus::exemplar();
  const auto p = poly2::BiPoly::from_terms({{0, 2, 1.0}, {1, 0, -1.0}});

  const auto it = poly2::check_inner_toral(p, 256, 64);
  std::cout << "w^2 - z inner toral: " << (it.pass ? "yes" : "no") << " (boundary deviation "
            << it.boundary_max_deviation << ")\n";

  const auto r = colligation::realize(colligation::evaluator(c));
  std::cout << "realized from " << r.samples_used << " samples, defect rank N = " << r.factor.N << '\n';

  const isopair::ShiftModel model(c, 6);
  const auto fac = isopair::make_factorization({p});
  const auto rank = isopair::compute_rank(model, fac, 20, 0);
  std::cout << "alpha = " << rank.alpha[0] << ", M = " << rank.M << ", N = " << rank.N << '\n';

  const poly2::VarietyPoint base{0.25, 0.5, true, std::nullopt};
  const auto t = kernel::make_admissible_triple(c, p, base, 1);
  const auto adm = kernel::verify_admissible(t, 50);
  std::cout << "kernel identity residual over " << adm.pairs << " pairs: " << adm.max_residual << '\n';
  std::cout << "Q = " << json_io::to_json(t.Q).dump() << '\n';

  const auto seq = ideal::cyclic_defect(c, t, base);
  std::cout << "cyclic defect at D = 8, 10, 12:";
  for (int v : seq.codimensions) std::cout << ' ' << v;
  std::cout << '\n';

  if (argc > 1) {
    std::ofstream csv(argv[1]);
    colligation::write_transfer_csv(csv, c, 64);
    std::cout << "boundary values written to " << argv[1] << '\n';
  }
  return 0;
}
