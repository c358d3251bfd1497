#include "doctest.h"
#include "test_support.hpp"

using namespace obd;
using testsupport::chacon;
using testsupport::chacon_g;

namespace {

Word apply_m(const LevelMorphism& m, const Word& w) {
  Word out;
  for (Sym x : w) {
    const Word& img = m.image(x);
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

Premorphism identity_premorphism(const Diagram& d) {
  Premorphism f;
  f.b1 = d;
  f.b2 = d;
  f.scale.identity = true;
  LevelMorphism tau;
  for (Sym v = 0; v < d.alphabet_size(1); ++v) tau.images.push_back({v});
  f.taus.push_back(tau);
  f.tau_tail = Tail{1, 1};
  return f;
}

// tau images {a, ab, ba}: a valid premorphism whose code is dependent.
Premorphism dependent_premorphism() {
  Diagram b1 = parse_obd(
      "obd 1\n"
      "level 1 = a b\n"
      "morphism 1: a = @ ; b = @\n"
      "level 2 = a b\n"
      "morphism 2: a = a ; b = a b b a\n"
      "tail from 2 period 1\n");
  Diagram b2 = parse_obd(
      "obd 1\n"
      "level 1 = p q r\n"
      "morphism 1: p = @ ; q = @ @ ; r = @ @\n"
      "level 2 = p q r\n"
      "morphism 2: p = p ; q = p q r ; r = q r p\n"
      "tail from 2 period 1\n");
  Premorphism f;
  f.b1 = b1;
  f.b2 = b2;
  f.scale.identity = true;
  LevelMorphism tau;
  tau.images = {Word{0}, Word{0, 1}, Word{1, 0}};  // a, ab, ba
  f.taus.push_back(tau);
  f.tau_tail = Tail{1, 1};
  return f;
}

}  // namespace

TEST_CASE("criterion_check on Chacon finds ell = n + 2 after failing at n + 1") {
  Premorphism g = chacon_g();
  auto res = criterion_check(g, 4);
  REQUIRE(res.status == CriterionStatus::Satisfied);
  for (const auto& row : res.levels) {
    CHECK(row.independent);
    REQUIRE(row.ell.has_value());
    CHECK(*row.ell == row.n + 2);
    REQUIRE(row.tried.size() == 2);
    CHECK(row.tried[0].ell == row.n + 1);
    CHECK(!row.tried[0].generated);
    CHECK(row.tried[1].ell == row.n + 2);
    CHECK(row.tried[1].generated);
    CHECK(row.tried[1].minimal);
  }
  REQUIRE(res.chain.size() >= 2);
  CHECK(res.chain[1] == res.chain[0] + 2);
}

TEST_CASE("criterion_check accepts letterwise identity premorphisms at one step") {
  auto res = criterion_check(identity_premorphism(chacon()), 3);
  REQUIRE(res.status == CriterionStatus::Satisfied);
  for (const auto& row : res.levels) {
    REQUIRE(row.ell.has_value());
    CHECK(*row.ell == row.n + 1);
  }
}

TEST_CASE("criterion_check refutes dependent tau images with a witness") {
  Premorphism f = dependent_premorphism();
  REQUIRE(validate_premorphism(f).ok());
  auto res = criterion_check(f, 4);
  CHECK(res.status == CriterionStatus::Refuted);
  REQUIRE(!res.levels.empty());
  for (const auto& row : res.levels) {
    CHECK(!row.independent);
    CHECK(!row.dependence_witness.empty());
  }
}

TEST_CASE("build_bridge produces the Chacon bridge and checks both triangles") {
  Premorphism g = chacon_g();
  auto bridge = build_bridge(g, 1, 3);
  // x -> u v, y -> w as index words over W_1.
  CHECK(bridge.map.image(0) == Word{0, 1});
  CHECK(bridge.map.image(1) == Word{2});

  // Item (4) in its reconstruction form: the unique D-factorization of
  // sigma^{B1} o tau recovers B2's one-step morphism u -> uv, v -> uvw,
  // w -> uvww.
  Code d;
  for (Sym w = 0; w < g.tau(1).size(); ++w) d.add(g.tau(1).image(w));
  for (Sym w = 0; w < g.b2.alphabet_size(2); ++w) {
    Word word = apply_m(g.b1.morphism(2), g.tau(2).image(w));
    auto fs = factorize(word, d, FactorizeMode::Unique);
    REQUIRE(fs.size() == 1);
    Word indices(fs[0].begin(), fs[0].end());
    CHECK(indices == g.b2.morphism(2).image(w));
  }
}

TEST_CASE("build_bridge rejects duplicate or dependent tau images") {
  Premorphism f = dependent_premorphism();
  CHECK_THROWS_AS(build_bridge(f, 1, 2), Error);

  Premorphism dup = chacon_g();
  dup.taus[0].images[1] = dup.taus[0].images[0];
  try {
    build_bridge(dup, 1, 3);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotIndependent);
  }
}

TEST_CASE("conjugacy_certify emits a verifiable certificate for Chacon") {
  Premorphism g = chacon_g();
  auto outcome = conjugacy_certify(g, 4);
  REQUIRE(outcome.status == CriterionStatus::Satisfied);
  CHECK(!outcome.partial);
  REQUIRE(outcome.certificate.has_value());
  auto verdict = verify_equivalence_certificate(*outcome.certificate, g.b1, g.b2);
  CHECK(verdict.verified);
  CHECK(outcome.certificate->spec_a.to_string() == "0 1 3 5 tail +2");
  CHECK(outcome.certificate->spec_b.to_string() == "0 1 3 5 tail +2");

  // A mutated interleaved morphism must be rejected with a located
  // counterexample.
  auto broken = *outcome.certificate;
  Diagram mutated;
  for (int n = 1; n <= broken.interleaved.top_level(); ++n) {
    LevelMorphism m = broken.interleaved.morphism(n);
    if (n == 2) std::swap(m.images[0], m.images[1]);
    mutated.add_level(broken.interleaved.level_names(n), m);
  }
  if (broken.interleaved.tail()) mutated.set_tail(*broken.interleaved.tail());
  broken.interleaved = mutated;
  auto bad = verify_equivalence_certificate(broken, g.b1, g.b2);
  CHECK(!bad.verified);
  CHECK(bad.counterexample.has_value());
}

TEST_CASE("conjugacy_certify handles the identity premorphism") {
  Diagram d = chacon();
  auto outcome = conjugacy_certify(identity_premorphism(d), 3);
  REQUIRE(outcome.status == CriterionStatus::Satisfied);
  REQUIRE(outcome.certificate.has_value());
  CHECK(verify_equivalence_certificate(*outcome.certificate, d, d).verified);
}

TEST_CASE("conjugacy_certify refutes the dependent premorphism") {
  auto outcome = conjugacy_certify(dependent_premorphism(), 4);
  CHECK(outcome.status == CriterionStatus::Refuted);
  CHECK(!outcome.certificate.has_value());
}

TEST_CASE("a satisfied period-two chain interleaves correctly") {
  // Two-level alternating premorphism built from the Chacon tau by
  // doubling the period; the criterion chain keeps step pattern 2.
  Premorphism g = chacon_g();
  Premorphism f = g;
  f.taus = {g.taus[0], g.taus[0]};
  f.tau_tail = Tail{2, 1};
  REQUIRE(validate_premorphism(f).ok());
  auto outcome = conjugacy_certify(f, 4);
  REQUIRE(outcome.status == CriterionStatus::Satisfied);
  CHECK(verify_equivalence_certificate(*outcome.certificate, f.b1, f.b2).verified);
}

TEST_CASE("conjugacy_certify composes the scale into the B2 spec") {
  Premorphism g = chacon_g();
  TelescopeSpec two;
  two.indices = {0, 2};
  two.tail_steps = {2};
  Premorphism f;
  f.b1 = telescope(g.b1, two);
  f.b2 = g.b2;
  f.scale.identity = false;
  f.scale.prefix = {2};
  f.scale.tail_step = 2;
  f.taus = g.taus;
  f.tau_tail = g.tau_tail;
  REQUIRE(validate_premorphism(f).ok());

  auto outcome = conjugacy_certify(f, 4);
  REQUIRE(outcome.status == CriterionStatus::Satisfied);
  REQUIRE(outcome.certificate.has_value());
  CHECK(verify_equivalence_certificate(*outcome.certificate, f.b1, f.b2).verified);
}

TEST_CASE("finite premorphisms yield partial verdicts with finite certificates") {
  Premorphism g = chacon_g();
  Premorphism f;
  for (int n = 1; n <= 9; ++n) {
    f.b1.add_level(g.b1.level_names(n), g.b1.morphism(n));
    f.b2.add_level(g.b2.level_names(n), g.b2.morphism(n));
  }
  f.scale.identity = true;
  for (int n = 1; n <= 9; ++n) f.taus.push_back(g.tau(n));
  REQUIRE(validate_premorphism(f).ok());

  auto outcome = conjugacy_certify(f, 4);
  REQUIRE(outcome.status == CriterionStatus::Satisfied);
  CHECK(outcome.partial);
  REQUIRE(outcome.certificate.has_value());
  CHECK(!outcome.certificate->interleaved.tail().has_value());
  CHECK(verify_equivalence_certificate(*outcome.certificate, f.b1, f.b2).verified);
}

TEST_CASE("an alternating diagram drives a period-two chain with a step pattern") {
  Diagram d = load_obd(testsupport::data_path("sturmian_b1.obd"));
  auto outcome = conjugacy_certify(identity_premorphism(d), 4);
  REQUIRE(outcome.status == CriterionStatus::Satisfied);
  CHECK(outcome.criterion.chain_steps.size() == 2);
  REQUIRE(outcome.certificate.has_value());
  CHECK(!outcome.certificate->spec_a.tail_steps.empty());
  CHECK(verify_equivalence_certificate(*outcome.certificate, d, d).verified);
}

TEST_CASE("a letterwise tau makes the bridge a relettering of sigma") {
  Diagram d = chacon();
  auto f = identity_premorphism(d);
  auto bridge = build_bridge(f, 1, 2);
  for (Sym v = 0; v < d.alphabet_size(2); ++v) {
    CHECK(bridge.map.image(v) == d.morphism(2).image(v));
  }
}

TEST_CASE("random premorphisms run the whole pipeline without surprises") {
  testsupport::Rng rng(606);
  for (int trial = 0; trial < 25; ++trial) {
    Premorphism f = trial % 2 == 0
                        ? testsupport::random_stationary_premorphism(rng, rng.uniform(2, 3),
                                                                     rng.uniform(1, 3))
                        : testsupport::random_alternating_premorphism(rng);
    REQUIRE(validate_premorphism(f).ok());
    auto outcome = conjugacy_certify(f, 6);
    if (outcome.status == CriterionStatus::Satisfied) {
      REQUIRE(outcome.certificate.has_value());
      CHECK(verify_equivalence_certificate(*outcome.certificate, f.b1, f.b2).verified);
    }
  }
}
