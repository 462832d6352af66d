// Prints how the single-walker position spread changes with the coin angle.

#include <cstdio>

#include "qwswap/walk.hpp"

using namespace qwswap;

int main() {
    const int steps = 5;
    for (double angle : {45.0, 22.5, 10.0}) {
        OnePhotonState initial;
        initial.add(PhotonBasisKet{Polarization::H, Mode{Line::Line2, 0}}, 1.0);
        const OnePhotonState evolved =
            run_single_walker(initial, CoinOperator::hwp(angle), steps);
        std::printf("coin angle %.1f deg after %d steps:\n", angle, steps);
        for (const auto& [position, prob] : position_distribution(evolved)) {
            std::printf("  %+d  %.6f  ", position, prob);
            const int bars = static_cast<int>(prob * 60.0 + 0.5);
            for (int i = 0; i < bars; ++i) std::printf("#");
            std::printf("\n");
        }
        std::printf("\n");
    }
    return 0;
}
