#include "doctest.h"
#include "test_support.hpp"

using namespace obd;
using testsupport::chacon;
using testsupport::chacon_g;

namespace {

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

}  // namespace

TEST_CASE("preprocess_assumptions prepares the Chacon premorphism") {
  auto res = preprocess_assumptions(chacon_g(), 8);
  REQUIRE(res.status == PrepareStatus::Prepared);
  const auto& t = *res.triple;
  CHECK(validate_premorphism(t.f).ok());
  CHECK(t.f.scale.identity);
  // The raw tau already connects fully, so both specs advance in step.
  for (size_t k = 1; k < t.b1_spec.indices.size(); ++k) {
    CHECK(t.b1_spec.indices[k] == t.b2_spec.indices[k]);
  }
  // Witnesses: min letter x, max letter y, two letters per level, full tau.
  for (size_t k = 1; k + 1 < t.witnesses.size(); ++k) {
    CHECK(t.witnesses[k].vmin == 0);
    CHECK(t.witnesses[k].vmax == 1);
    CHECK(t.witnesses[k].card_ge2);
    CHECK(t.witnesses[k].tau_full);
  }
}

TEST_CASE("preprocess_assumptions is inconclusive on a non-simple diagram") {
  Diagram odometer = parse_obd(
      "obd 1\n"
      "level 1 = a b\n"
      "morphism 1: a = @ ; b = @\n"
      "level 2 = a b\n"
      "morphism 2: a = a ; b = b\n"
      "tail from 2 period 1\n");
  auto res = preprocess_assumptions(identity_premorphism(odometer), 6);
  CHECK(res.status == PrepareStatus::Inconclusive);
  CHECK(res.note.find("assumption (1)") != std::string::npos);
}

TEST_CASE("rank one shortcuts the pipeline") {
  Diagram solo = parse_obd(
      "obd 1\n"
      "level 1 = a\n"
      "morphism 1: a = @ @\n"
      "level 2 = a\n"
      "morphism 2: a = a a\n"
      "tail from 2 period 1\n");
  auto res = reduce_rank(identity_premorphism(solo), 6);
  CHECK(res.status == PrepareStatus::RankOne);
  REQUIRE(res.reduced.has_value());
  CHECK(*res.reduced == solo);
  REQUIRE(res.certificate.has_value());
  CHECK(verify_equivalence_certificate(*res.certificate, solo, solo).verified);
}

TEST_CASE("cover_basis on the Chacon triple") {
  auto res = preprocess_assumptions(chacon_g(), 8);
  REQUIRE(res.status == PrepareStatus::Prepared);
  auto cb = cover_basis(*res.triple, 1, 8);
  CHECK(cb.level == 1);
  CHECK(cb.witness_level == 5);  // first level whose anchors outgrow |tau|
  CHECK(cb.code.size() <= 3 * res.triple->f.b2.alphabet_size(1));
  auto targets = compose_morphisms(res.triple->f.b1, 1, cb.witness_level);
  for (Sym v = 0; v < targets.size(); ++v) {
    CHECK(!factorize(targets.image(v), cb.code, FactorizeMode::Greedy).empty());
  }
}

TEST_CASE("cover_basis keeps tau images in the block-aligned case") {
  // tau(p) = xy against sigma(x) = sigma(y) = xy: every level-word is a
  // power of xy, so every cut lands on a block boundary and no
  // three-word basis is needed.
  Diagram b1 = parse_obd(
      "obd 1\n"
      "level 1 = x y\n"
      "morphism 1: x = @ ; y = @\n"
      "level 2 = x y\n"
      "morphism 2: x = x y ; y = x y\n"
      "tail from 2 period 1\n");
  Diagram b2 = parse_obd(
      "obd 1\n"
      "level 1 = p\n"
      "morphism 1: p = @ @\n"
      "level 2 = p\n"
      "morphism 2: p = p p\n"
      "tail from 2 period 1\n");
  Premorphism f;
  f.b1 = b1;
  f.b2 = b2;
  f.scale.identity = true;
  LevelMorphism tau;
  tau.images = {Word{0, 1}};
  f.taus.push_back(tau);
  f.tau_tail = Tail{1, 1};
  REQUIRE(validate_premorphism(f).ok());

  auto res = preprocess_assumptions(f, 8);
  REQUIRE(res.status == PrepareStatus::Prepared);
  auto cb = cover_basis(*res.triple, 1, 8);
  for (const auto& cut : cb.cuts) CHECK(cut.s.empty());
  // C_n within the tau images themselves.
  for (int i = 0; i < cb.code.size(); ++i) {
    bool is_tau_image = false;
    const auto& tau_prepared = res.triple->f.tau(1);
    for (Sym w = 0; w < tau_prepared.size(); ++w) {
      is_tau_image = is_tau_image || cb.code[i] == tau_prepared.image(w);
    }
    CHECK(is_tau_image);
  }
}

TEST_CASE("reduce_rank on Chacon meets the bound with a verified certificate") {
  Premorphism g = chacon_g();
  auto res = reduce_rank(g, 8);
  REQUIRE(res.status == PrepareStatus::Prepared);
  CHECK(res.b2_rank == 3);
  CHECK(res.output_rank <= 9);
  REQUIRE(res.certificate.has_value());
  auto verdict = verify_equivalence_certificate(*res.certificate, g.b1, *res.reduced);
  CHECK(verdict.verified);
  CHECK(validate_diagram(*res.reduced).ok());

  // Determinism: identical inputs give identical bytes.
  auto res2 = reduce_rank(g, 8);
  CHECK(emit_obd(*res.reduced) == emit_obd(*res2.reduced));
  CHECK(emit_cert(*res.certificate) == emit_cert(*res2.certificate));
}

TEST_CASE("identity premorphism keeps the rank unchanged") {
  auto res = reduce_rank(identity_premorphism(chacon()), 8);
  REQUIRE(res.status == PrepareStatus::Prepared);
  CHECK(res.output_rank == diagram_rank(chacon()));
  CHECK(verify_equivalence_certificate(*res.certificate, chacon(), *res.reduced).verified);
}

TEST_CASE("seeded stationary premorphisms satisfy the bound") {
  testsupport::Rng rng(4242);
  int successes = 0;
  for (int trial = 0; trial < 25; ++trial) {
    Premorphism f =
        testsupport::random_stationary_premorphism(rng, rng.uniform(2, 3), rng.uniform(1, 3));
    REQUIRE(validate_premorphism(f).ok());
    auto res = reduce_rank(f, 12);
    REQUIRE(res.status != PrepareStatus::Inconclusive);
    if (res.status == PrepareStatus::Prepared) {
      CHECK(res.output_rank <= 3 * res.b2_rank);
      CHECK(verify_equivalence_certificate(*res.certificate, f.b1, *res.reduced).verified);
    }
    ++successes;
  }
  CHECK(successes == 25);
}

TEST_CASE("reduce_rank handles a non-identity scale") {
  // B1 is the two-step telescoping of Chacon; the scale walks B2 at
  // twice the speed.
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

  auto res = reduce_rank(f, 8);
  REQUIRE(res.status == PrepareStatus::Prepared);
  CHECK(res.output_rank <= 3 * res.b2_rank);
  CHECK(verify_equivalence_certificate(*res.certificate, f.b1, *res.reduced).verified);
}

TEST_CASE("reduce_rank on finite inputs reduces the represented prefix") {
  Premorphism g = chacon_g();
  Premorphism f;
  for (int n = 1; n <= 12; ++n) {
    f.b1.add_level(g.b1.level_names(n), g.b1.morphism(n));
    f.b2.add_level(g.b2.level_names(n), g.b2.morphism(n));
  }
  f.scale.identity = true;
  for (int n = 1; n <= 12; ++n) f.taus.push_back(g.tau(n));
  REQUIRE(validate_premorphism(f).ok());

  auto res = reduce_rank(f, 8);
  REQUIRE(res.status == PrepareStatus::Prepared);
  CHECK(!res.reduced->tail().has_value());
  CHECK(res.output_rank <= 3 * res.b2_rank);
  CHECK(verify_equivalence_certificate(*res.certificate, f.b1, *res.reduced).verified);
}

TEST_CASE("reduce_rank closes the period on the alternating Sturmian pair") {
  Premorphism f = testsupport::sturmian_f();
  auto res = reduce_rank(f, 10);
  REQUIRE(res.status == PrepareStatus::Prepared);
  CHECK(res.b2_rank == 3);
  CHECK(res.output_rank <= 9);
  REQUIRE(res.certificate.has_value());
  CHECK(verify_equivalence_certificate(*res.certificate, f.b1, *res.reduced).verified);
  CHECK(validate_diagram(*res.reduced).ok());
}

TEST_CASE("seeded alternating premorphisms satisfy the bound too") {
  testsupport::Rng rng(9090);
  for (int trial = 0; trial < 15; ++trial) {
    Premorphism f = testsupport::random_alternating_premorphism(rng);
    REQUIRE(validate_premorphism(f).ok());
    auto res = reduce_rank(f, 12);
    REQUIRE(res.status == PrepareStatus::Prepared);
    CHECK(res.output_rank <= 3 * res.b2_rank);
    CHECK(verify_equivalence_certificate(*res.certificate, f.b1, *res.reduced).verified);
  }
}
