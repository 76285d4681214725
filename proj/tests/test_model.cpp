#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "djcm/model.hpp"

namespace {

using namespace djcm;

ModelParams paper_set() {
    ModelParams p;
    p.omega_c = 0.4;
    p.omega_eg = 0.9;
    p.g = 1.0;
    p.zeta = 0.7;
    p.xi = 0.2;
    return validate_params(p);
}

TEST(ValidateParams, DerivesDriveFrequencyFromConstriction) {
    const ModelParams p = paper_set();
    EXPECT_NEAR(p.omega_0, 0.4 - 0.2 / 0.7, 1e-15);
    EXPECT_NEAR(p.omega_0, 0.1142857142857143, 1e-12);
}

TEST(ValidateParams, UndrivenSetsDriveFrequencyToCavity) {
    ModelParams p;
    p.omega_c = 0.4;
    p.omega_eg = 0.9;
    p.g = 1.0;
    p.zeta = 0.0;
    p.xi = 0.5;  // irrelevant without the atom-drive coupling
    const ModelParams v = validate_params(p);
    EXPECT_DOUBLE_EQ(v.omega_0, 0.4);
}

TEST(ValidateParams, RejectsVanishingCouplingWithDrive) {
    ModelParams p;
    p.omega_c = 0.4;
    p.omega_eg = 0.9;
    p.g = 0.0;
    p.zeta = 0.5;
    EXPECT_THROW(validate_params(p), NonPositiveCoupling);
    p.g = -1.0;
    p.zeta = 0.0;
    EXPECT_THROW(validate_params(p), NonPositiveCoupling);
}

TEST(ValidateParams, AllowsVanishingCouplingWithoutDrive) {
    ModelParams p;
    p.omega_c = 0.4;
    p.omega_eg = 0.9;
    p.g = 0.0;
    p.zeta = 0.0;
    EXPECT_NO_THROW(validate_params(p));
}

TEST(ValidateParams, RejectsNegativeRates) {
    ModelParams p;
    p.omega_c = 0.4;
    p.omega_eg = 0.9;
    p.g = 1.0;
    p.zeta = -0.1;
    EXPECT_THROW(validate_params(p), NegativeRate);
    p.zeta = 0.1;
    p.xi = -0.2;
    EXPECT_THROW(validate_params(p), NegativeRate);
    p.xi = 0.2;
    p.omega_c = 0.0;
    EXPECT_THROW(validate_params(p), NegativeRate);
    p.omega_c = 0.4;
    p.omega_eg = -0.9;
    EXPECT_THROW(validate_params(p), NegativeRate);
}

TEST(ValidateParams, ChecksExplicitDriveFrequency) {
    ModelParams p;
    p.omega_c = 0.4;
    p.omega_eg = 0.9;
    p.g = 1.0;
    p.zeta = 0.7;
    p.xi = 0.2;
    p.omega_0 = 0.2;  // should be ~0.114286
    EXPECT_THROW(validate_params(p), ConstrictionViolated);
    p.omega_0 = 0.4 - 0.2 / 0.7;
    EXPECT_NO_THROW(validate_params(p));
}

TEST(Derive, PaperSet) {
    const DerivedParams d = derive(paper_set());
    EXPECT_NEAR(d.delta_c, 0.2857142857142857, 1e-15);
    EXPECT_NEAR(d.delta_eg, 0.9 - 0.1142857142857143, 1e-12);
    EXPECT_DOUBLE_EQ(d.delta, 0.5);
    EXPECT_DOUBLE_EQ(d.alpha, 0.7);
}

TEST(Derive, UndrivenReduction) {
    ModelParams p;
    p.omega_c = 0.4;
    p.omega_eg = 0.9;
    p.g = 1.0;
    p.zeta = 0.0;
    p.xi = 0.3;
    const DerivedParams d = derive(validate_params(p));
    EXPECT_DOUBLE_EQ(d.alpha, 0.0);
    EXPECT_DOUBLE_EQ(d.delta_c, 0.0);
    EXPECT_DOUBLE_EQ(d.delta, 0.5);
}

TEST(Derive, ResonanceGivesZeroDetuning) {
    ModelParams p;
    p.omega_c = 0.9;
    p.omega_eg = 0.9;
    p.g = 1.0;
    p.zeta = 0.7;
    p.xi = 0.2;
    const DerivedParams d = derive(validate_params(p));
    EXPECT_DOUBLE_EQ(d.delta, 0.0);
}

TEST(Derive, DetuningIdentityOverRandomParams) {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> freq(0.05, 5.0);
    std::uniform_real_distribution<double> coupling(0.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        ModelParams p;
        p.omega_c = freq(rng);
        p.omega_eg = freq(rng);
        p.g = 0.1 + coupling(rng);
        p.zeta = coupling(rng);
        p.xi = coupling(rng);
        const ModelParams v = validate_params(p);
        const DerivedParams d = derive(v);
        EXPECT_DOUBLE_EQ(d.delta, p.omega_eg - p.omega_c);
        EXPECT_NEAR(d.delta, d.delta_eg - d.delta_c, 1e-12);
        EXPECT_DOUBLE_EQ(d.alpha, p.zeta > 0.0 ? p.zeta / v.g : 0.0);
    }
}

TEST(RabiFrequency, KnownValues) {
    EXPECT_DOUBLE_EQ(rabi_frequency(0.0, 1.0, 1), 1.0);
    EXPECT_NEAR(rabi_frequency(0.5, 1.0, 1), 1.0307764064044151, 1e-15);
    EXPECT_DOUBLE_EQ(rabi_frequency(3.0, 0.0, 5), 1.5);
    EXPECT_DOUBLE_EQ(rabi_frequency(0.0, 0.0, 3), 0.0);
}

TEST(RabiFrequency, LowerBoundsAndEvenness) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double delta = u(rng) - 5.0;
        const double g = u(rng) * 0.3;
        const long n = static_cast<long>(u(rng) * 10.0);
        const double omega = rabi_frequency(delta, g, n);
        EXPECT_GE(omega, g * std::sqrt(static_cast<double>(n)) - 1e-15);
        EXPECT_GE(omega, 0.5 * std::abs(delta) - 1e-15);
        // even in delta, bit for bit
        EXPECT_EQ(omega, rabi_frequency(-delta, g, n));
    }
}

TEST(ThermalWeights, VacuumIsSingleTerm) {
    const auto w = thermal_weights(0.0, {});
    ASSERT_EQ(w.size(), 1u);
    EXPECT_DOUBLE_EQ(w[0], 1.0);
}

TEST(ThermalWeights, PartialSumsMonotoneAndConverge) {
    const TruncationPolicy policy;
    for (double n_bar : {0.1, 4.0, 15.0}) {
        const auto w = thermal_weights(n_bar, policy);
        double sum = 0.0;
        double prev = -1.0;
        for (double wk : w) {
            EXPECT_GT(wk, 0.0);
            sum += wk;
            EXPECT_GT(sum, prev);
            prev = sum;
        }
        EXPECT_NEAR(sum, 1.0, policy.epsilon);
        EXPECT_LE(w.size(), thermal_terms_needed(n_bar, policy.epsilon) + 1);
    }
}

TEST(ThermalWeights, CapHitThrows) {
    TruncationPolicy policy;
    policy.max_terms = 16;
    EXPECT_THROW(thermal_weights(10.0, policy), TruncationCapExceeded);
}

TEST(TruncationPolicy, Validation) {
    TruncationPolicy p;
    EXPECT_NO_THROW(p.validate());
    p.epsilon = 0.0;
    EXPECT_THROW(p.validate(), Error);
    p.epsilon = 1e-12;
    p.max_terms = 8;
    EXPECT_THROW(p.validate(), Error);
}

TEST(FieldSpec, Construction) {
    const FieldSpec t = FieldSpec::thermal(4.0);
    EXPECT_TRUE(t.is_thermal());
    EXPECT_DOUBLE_EQ(t.n_bar, 4.0);
    const FieldSpec f = FieldSpec::fock(10);
    EXPECT_FALSE(f.is_thermal());
    EXPECT_EQ(f.k, 10);
    EXPECT_THROW(FieldSpec::thermal(-0.5), NegativeRate);
    EXPECT_THROW(FieldSpec::fock(-1), NegativeRate);
}

}  // namespace
