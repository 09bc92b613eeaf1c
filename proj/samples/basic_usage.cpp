// Solve (x+2)^2 (x-1) (x-3)^3 from a rough start and print each iterate.
#include <cstdio>

#include <gek/gek.hpp>

int main() {
    const gek::root_system rs({-2.0, 1.0, 3.0}, {2, 1, 3});
    const gek::monic_polynomial p = gek::poly_from_roots(rs);

    gek::solve_config cfg;
    cfg.step_tolerance = 1e-15;
    const gek::approximation_vector start{-3.0, 0.1, 4.0};
    const gek::solve_report r = gek::solve(p, rs.multiplicities(), start, cfg);

    for (const auto& rec : r.trace.iterations) {
        std::printf("%d", rec.k);
        for (const auto& z : rec.approximations) std::printf("  %.17g", z.real());
        std::printf("\n");
    }
    std::printf("%s after %d iterations\n", gek::to_string(r.status), r.iterations_used);
    return r.status == gek::solve_status::converged ? 0 : 1;
}
