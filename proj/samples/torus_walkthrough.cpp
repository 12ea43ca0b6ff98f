// Walk through the library on the 2-torus: Betti numbers, harmonic
// 1-cochains, their cup product, and the formality residuals under unit
// and random weights.

#include <iostream>

#include <hodgeformal/hodgeformal.hpp>

int main()
{
    using namespace hodgeformal;

    const auto K = torus(2);
    const auto b = betti_numbers(K);
    std::cout << K.name() << ": f-vector";
    for (auto f : K.f_vector())
        std::cout << ' ' << f;
    std::cout << ", Betti";
    for (int x : b.values)
        std::cout << ' ' << x;
    std::cout << "\n";

    const auto w = unit_weights(K);
    const auto h1 = harmonic_basis(K, w, 1);
    std::cout << "harmonic 1-cochains: " << h1.size() << " (method " << h1.method << ", spectral gap "
              << h1.spectral_gap << ")\n";

    // Integral generators pair to +-1 against the fundamental class.
    const auto gens = integral_harmonic_generators(K, h1);
    const auto Q = cup_pairing(K, require_orientation(K), gens);
    std::cout << "cup pairing of integral generators:\n" << Q << "\n";

    for (bool symmetric : {false, true})
    {
        FormalityOptions opt;
        opt.symmetric_product = symmetric;
        const auto unit = formality_residual(K, w, opt);
        const auto random = formality_residual(K, random_weights(K, 42), opt);
        std::cout << (symmetric ? "symmetrized" : "Alexander-Whitney") << " product: aggregate residual "
                  << unit.aggregate << " (unit weights), " << random.aggregate << " (random weights)\n";
    }
    return 0;
}
