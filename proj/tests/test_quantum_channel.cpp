#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "memchan/channels.hpp"
#include "memchan/quantum_channel.hpp"
#include "oracles.hpp"

using namespace memchan;
using Catch::Matchers::WithinAbs;

namespace {

QuantumChannel random_channel(Index din, Index dout, int kraus_count, std::mt19937_64& rng) {
  // Isometry columns from a random unitary, cut into Kraus blocks.
  const ComplexMatrix u = random_unitary(dout * kraus_count, rng);
  std::vector<ComplexMatrix> kraus;
  for (int k = 0; k < kraus_count; ++k) kraus.push_back(u.block(k * dout, 0, dout, din));
  return QuantumChannel(din, dout, kraus);
}

}  // namespace

TEST_CASE("Choi matrix follows the definition", "[channel]") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const QuantumChannel ch = random_channel(2, 3, 3, rng);
    const ChoiMatrix c = choi_of(ch);
    REQUIRE(c.matrix.rows() == 6);
    CHECK(oracle::max_diff(c.matrix, oracle::choi(ch.kraus(), 2)) < 1e-14);
    CHECK(hermitian_eigenvalues(c.matrix).minCoeff() > -1e-10);
    // Tracing out the output gives the identity on the input.
    CHECK(oracle::max_diff(oracle::trace_second(c.matrix, 2, 3), ComplexMatrix::Identity(2, 2)) < 1e-12);
  }
}

TEST_CASE("Choi examples", "[channel]") {
  const ChoiMatrix id = choi_of(QuantumChannel::identity(2));
  ComplexVector omega = ComplexVector::Zero(4);
  omega(0) = omega(3) = 1.0;
  CHECK(max_abs_difference(id.matrix, omega * omega.adjoint()) < 1e-15);

  const ChoiMatrix p0 = choi_of(phase_damping(0.0));
  ComplexMatrix off = p0.matrix;
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("Choi form is independent of the Kraus representation", "[channel][property]") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const QuantumChannel ch = random_channel(2, 2, 3, rng);
    // Mix the Kraus operators with a random unitary.
    const ComplexMatrix w = random_unitary(3, rng);
    std::vector<ComplexMatrix> mixed(3, ComplexMatrix::Zero(2, 2));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mixed[static_cast<std::size_t>(i)] += w(i, j) * ch.kraus()[static_cast<std::size_t>(j)];
    const QuantumChannel other(2, 2, mixed);
    CHECK(choi_distance(ch, other) < 1e-10);
    CHECK(same_map(ch, other));
    const QuantumChannel compressed(2, 2, compress_kraus(ch.kraus()));
    CHECK(choi_distance(ch, compressed) < 1e-10);
  }
  CHECK_FALSE(same_map(phase_damping(0.5), phase_damping(0.4)));
}

TEST_CASE("channel construction validates completeness and shapes", "[channel]") {
  std::vector<ComplexMatrix> bad{0.9 * ComplexMatrix::Identity(2, 2)};
  CHECK_THROWS_AS(QuantumChannel(2, 2, bad), InvalidState);
  std::vector<ComplexMatrix> wrong_shape{ComplexMatrix::Identity(3, 3)};
  CHECK_THROWS_AS(QuantumChannel(2, 2, wrong_shape), DimensionMismatch);
  CHECK(QuantumChannel::identity(3).completeness_error() < 1e-15);
}

TEST_CASE("compose and tensor act as map composition and product", "[channel][property]") {
  std::mt19937_64 rng(12);
  const QuantumChannel a = random_channel(2, 2, 2, rng);
  const QuantumChannel b = random_channel(2, 3, 2, rng);
  const DensityOperator rho = random_density(2, rng);
  CHECK(max_abs_difference(compose(b, a).apply(rho.matrix()), b.apply(a.apply(rho.matrix()))) < 1e-13);

  const DensityOperator r2 = random_density(2, rng);
  const ComplexMatrix expected = tensor(a.apply(rho.matrix()), b.apply(r2.matrix()));
  CHECK(max_abs_difference(tensor(a, b).apply(tensor(rho.matrix(), r2.matrix())), expected) < 1e-13);
  CHECK_THROWS_AS(compose(a, b), DimensionMismatch);
}

TEST_CASE("complementary output has the channel's entropy exchange", "[channel][property]") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const QuantumChannel ch = random_channel(2, 2, 3, rng);
    const DensityOperator rho = random_density(2, rng);
    // Oracle: Stinespring isometry V = sum_k K_k (x) |k>, trace out the output.
    ComplexMatrix v = ComplexMatrix::Zero(2 * 3, 2);
    for (int k = 0; k < 3; ++k) {
      for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 2; ++j) v(i * 3 + k, j) = ch.kraus()[static_cast<std::size_t>(k)](i, j);
    }
    const ComplexMatrix joint = v * rho.matrix() * v.adjoint();
    const ComplexMatrix env = oracle::trace_first(joint, 2, 3);
    const ComplexMatrix comp = complementary_output(ch, rho.matrix());
    CHECK_THAT(oracle::entropy(comp), WithinAbs(oracle::entropy(env), 1e-10));
    CHECK(oracle::max_diff(comp, env) < 1e-12);
  }
}
