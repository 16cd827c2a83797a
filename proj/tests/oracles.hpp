// Test-only oracles: closed-form and brute-force enumerations of the
// statistics the simulator is expected to reproduce. Everything here is
// derived from first principles (basis-match logic and the cos^2 rule),
// independent of the implementation under test.
#pragma once

#include <cmath>

namespace oracles {

struct InterceptResendExpectation {
    double sift_fraction;
    double qber;
    double eve_knowledge;
};

// Enumerate (alice basis, alice bit, eve basis, bob basis) with the exact
// branch probabilities of measure-and-resend eavesdropping. Bases are 0/1,
// bits 0/1. A wrong-basis measurement yields either bit with probability
// one half and re-encodes in the measuring basis.
inline InterceptResendExpectation enumerate_intercept_resend() {
    double p_sift = 0.0;
    double p_sift_and_error = 0.0;
    double p_sift_and_eve_correct = 0.0;

    for (int alice_basis = 0; alice_basis < 2; ++alice_basis) {
        for (int alice_bit = 0; alice_bit < 2; ++alice_bit) {
            for (int eve_basis = 0; eve_basis < 2; ++eve_basis) {
                for (int bob_basis = 0; bob_basis < 2; ++bob_basis) {
                    const double w = 1.0 / 16.0;
                    const bool sifted = bob_basis == alice_basis;
                    if (!sifted) {
                        continue;
                    }
                    p_sift += w;
                    // Eve's outcome branches.
                    for (int eve_bit = 0; eve_bit < 2; ++eve_bit) {
                        const double p_eve = eve_basis == alice_basis
                                                 ? (eve_bit == alice_bit ? 1.0 : 0.0)
                                                 : 0.5;
                        if (p_eve == 0.0) {
                            continue;
                        }
                        // Bob measures Eve's re-encoded state in his basis.
                        for (int bob_bit = 0; bob_bit < 2; ++bob_bit) {
                            const double p_bob = bob_basis == eve_basis
                                                     ? (bob_bit == eve_bit ? 1.0 : 0.0)
                                                     : 0.5;
                            if (p_bob == 0.0) {
                                continue;
                            }
                            const double p = w * p_eve * p_bob;
                            if (bob_bit != alice_bit) {
                                p_sift_and_error += p;
                            }
                            if (eve_bit == alice_bit) {
                                p_sift_and_eve_correct += p * (1.0 / 1.0);
                            }
                        }
                    }
                }
            }
        }
    }
    // Eve-correct mass was accumulated once per bob branch; bob branches sum
    // to 1 for each eve branch, so the division below is exact.
    return InterceptResendExpectation{p_sift, p_sift_and_error / p_sift,
                                      p_sift_and_eve_correct / p_sift};
}

struct FakedStateExpectation {
    double detection_rate;
    double sifted_yield;
    double qber;
    double eve_knowledge;
};

// Enumerate the equiprobable branches of the detector-control attack: Eve's
// basis, her outcome, Bob's basis, and the Bernoulli click. A click happens
// only when Bob's basis equals Eve's and the coin passes, and it always
// carries Eve's bit.
inline FakedStateExpectation enumerate_faked_state() {
    double p_click = 0.0;
    double p_sift = 0.0;
    double p_sift_and_error = 0.0;
    double p_sift_and_eve_correct = 0.0;

    for (int alice_basis = 0; alice_basis < 2; ++alice_basis) {
        for (int alice_bit = 0; alice_bit < 2; ++alice_bit) {
            for (int eve_basis = 0; eve_basis < 2; ++eve_basis) {
                for (int eve_bit = 0; eve_bit < 2; ++eve_bit) {
                    const double p_eve = eve_basis == alice_basis
                                             ? (eve_bit == alice_bit ? 1.0 : 0.0)
                                             : 0.5;
                    if (p_eve == 0.0) {
                        continue;
                    }
                    for (int bob_basis = 0; bob_basis < 2; ++bob_basis) {
                        for (int coin = 0; coin < 2; ++coin) {
                            const double p = (1.0 / 16.0) * p_eve * 0.5;
                            const bool click = bob_basis == eve_basis && coin == 1;
                            if (!click) {
                                continue;
                            }
                            p_click += p;
                            if (bob_basis == alice_basis) {
                                p_sift += p;
                                if (eve_bit != alice_bit) {
                                    p_sift_and_error += p;
                                }
                                if (eve_bit == alice_bit) {
                                    p_sift_and_eve_correct += p;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return FakedStateExpectation{p_click, p_sift, p_sift_and_error / p_sift,
                                 p_sift_and_eve_correct / p_sift};
}

// 3-sigma binomial half-width for a frequency estimate.
inline double binomial_3sigma(double p, double n) {
    return 3.0 * std::sqrt(p * (1.0 - p) / n);
}

} // namespace oracles
