#include <gtest/gtest.h>

#include <filesystem>
#include <variant>

#include "gmsfp/gmsfp.hpp"
#include "gmsfp/io.hpp"

using namespace gmsfp;
using io::json;

namespace {

const std::filesystem::path kFixtures = GMSFP_FIXTURES;

json fixture(const char* name) { return io::read_json_file(kFixtures / name); }

}  // namespace

TEST(Scalars, RationalAndDouble) {
  EXPECT_EQ(io::scalar_from_json<Rational>(json("8/15")), Rational(8, 15));
  EXPECT_EQ(io::scalar_from_json<Rational>(json(3)), Rational(3));
  EXPECT_EQ(io::scalar_from_json<Rational>(json(0.25)), Rational(1, 4));
  EXPECT_DOUBLE_EQ(io::scalar_from_json<double>(json("1/4")), 0.25);
  EXPECT_THROW(io::scalar_from_json<Rational>(json("x")), MalformedInput);
  EXPECT_THROW(io::scalar_from_json<Rational>(json::array()), MalformedInput);
  EXPECT_THROW(io::scalar_from_json<double>(json(true)), MalformedInput);
  EXPECT_EQ(io::to_json_scalar(Rational(-2, 6)), json("-1/3"));
}

TEST(Spaces, FiniteRoundTrip) {
  const auto s = io::gms_from_json(fixture("four_point.json"));
  const auto ref = example_gms_not_metric();
  ASSERT_EQ(s.size(), ref.size());
  EXPECT_EQ(s.labels(), ref.labels());
  EXPECT_EQ(s.table(), ref.table());
  const auto again = io::gms_from_json(io::gms_to_json(s));
  EXPECT_EQ(again.table(), s.table());
  EXPECT_EQ(io::gms_to_json(again).dump(), io::gms_to_json(s).dump());
}

TEST(Spaces, MalformedTables) {
  EXPECT_THROW(io::gms_from_json(json::object()), MalformedInput);
  EXPECT_THROW(io::gms_from_json(json::parse(R"({"points": ["a", "b"], "dist": [["0", "1"]]})")), MalformedTable);
  EXPECT_THROW(io::gms_from_json(json::parse(R"({"points": ["a", "b"], "dist": [["0", "x"], ["x", "0"]]})")),
               MalformedTable);
  EXPECT_THROW(io::gms_from_json(json{{"points", "ab"}, {"dist", json::array()}}), MalformedTable);
}

TEST(Spaces, IntervalRoundTripAndPaths) {
  const json j = {{"interval", {{"lower", 0}, {"upper", 2}, {"grid_count", 5}}}};
  const auto iv = io::interval_from_json(j);
  EXPECT_EQ(iv.point(3), 1.5);
  EXPECT_EQ(io::interval_to_json(iv), j);
  EXPECT_THROW(io::interval_from_json(json{{"interval", {{"lower", 0}, {"upper", 2}, {"grid_count", -3}}}}),
               MalformedInput);

  const auto by_path = io::space_from_json(json("four_point.json"), kFixtures);
  EXPECT_TRUE(std::holds_alternative<FiniteGMS<Rational>>(by_path));
  EXPECT_TRUE(std::holds_alternative<SampledIntervalSpace>(io::space_from_json(j)));
  EXPECT_THROW(io::space_from_json(json("nope.json"), kFixtures), MalformedInput);
}

TEST(Points, ParseAndEmit) {
  const auto s = example_gms_not_metric();
  EXPECT_EQ(io::point_from_json(s, json("7/12")), 2u);
  EXPECT_EQ(io::point_to_json(s, 3), json("8/15"));
  EXPECT_THROW(io::point_from_json(s, json("1/9")), UnknownPoint);
  EXPECT_THROW(io::point_from_json(s, json::object()), MalformedInput);
  const SampledIntervalSpace iv(0, 1, 11);
  EXPECT_EQ(io::parse_point(iv, "1/2"), 0.5);
  EXPECT_THROW(io::parse_point(iv, "2"), UnknownPoint);
}

TEST(Maps, CatalogAndTables) {
  EXPECT_EQ(io::catalog_from_json(json("halving")).kind, CatalogMap::Kind::halving);
  const auto c = io::catalog_from_json(json{{"kind", "constant"}, {"value", "8/15"}});
  EXPECT_EQ(c.point_label, std::optional<std::string>("8/15"));
  EXPECT_EQ(io::catalog_to_json(c), (json{{"kind", "constant"}, {"value", "8/15"}}));
  const auto a = io::catalog_from_json(json{{"kind", "affine"}, {"a", 0.5}, {"b", 0.25}});
  EXPECT_EQ(a(1.0), 0.75);
  EXPECT_EQ(io::catalog_from_json(io::catalog_to_json(a))(1.0), 0.75);
  EXPECT_THROW(io::catalog_from_json(json("square")), MalformedInput);

  const auto s = example_gms_not_metric();
  EXPECT_EQ(io::finite_map_from_json(s, json{{"table", {"2/3", "2/3", "8/15", "8/15"}}}),
            (std::vector<std::size_t>{1, 1, 3, 3}));
  EXPECT_EQ(io::finite_map_from_json(s, json{{"table", {{"5/6", "2/3"}, {"2/3", "5/6"}, {"7/12", "7/12"},
                                                       {"8/15", "8/15"}}}}),
            (std::vector<std::size_t>{1, 0, 2, 3}));
  EXPECT_THROW(io::finite_map_from_json(s, json{{"table", {{"5/6", "2/3"}}}}), MalformedInput);
  EXPECT_THROW(io::finite_map_from_json(s, json{{"table", {"2/3"}}}), MalformedInput);
}

TEST(Controls, RoundTrip) {
  for (const json& j : {json{{"kind", "scale"}, {"k", "1/2"}}, json{{"kind", "saturating"}},
                        json{{"kind", "capped"}, {"k", "9/10"}, {"cap", "2"}},
                        json{{"kind", "table"}, {"knots", {"0", "1"}}, {"values", {"0", "1/2"}}}}) {
    const auto f = io::control_from_json<Rational>(j);
    EXPECT_EQ(io::control_to_json(f), j);
  }
  EXPECT_EQ(io::control_from_json<double>(json{{"kind", "identity"}})(3.0), 3.0);
  EXPECT_THROW(io::control_from_json<double>(json{{"kind", "cubic"}}), MalformedInput);
  EXPECT_THROW(io::control_from_json<double>(json{{"kind", "scale"}}), MalformedInput);
}

TEST(Beta, Kinds) {
  const auto s = example_gms_not_metric();
  EXPECT_EQ(io::beta_from_json(s, json{{"kind", "constant"}, {"value", 2}})(0, 1), Rational(2));
  const json table = {{"kind", "table"},
                      {"values", {{1, 2, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, "1/2"}}}};
  const auto b = io::beta_from_json(s, table);
  EXPECT_EQ(b(0, 1), Rational(2));
  EXPECT_EQ(b(3, 3), Rational(1, 2));
  EXPECT_THROW(io::beta_from_json(s, json{{"kind", "table"}, {"values", {{1}}}}), MalformedInput);
  const SampledIntervalSpace iv(0, 1, 11);
  const auto order = io::beta_from_json(iv, json{{"kind", "order"}, {"if_geq", 1}, {"otherwise", 0}});
  EXPECT_EQ(order(0.5, 0.2), 1.0);
  EXPECT_EQ(order(0.2, 0.5), 0.0);
  EXPECT_THROW(io::beta_from_json(iv, table), MalformedInput);
}

TEST(Problems, Fixtures) {
  const auto halving = io::problem_from_json(fixture("halving_grid.json"), kFixtures);
  const auto& hp = std::get<io::MapProblem<SampledIntervalSpace>>(halving);
  EXPECT_EQ(hp.space.size(), 101u);
  EXPECT_EQ(hp.x0, std::optional<double>(1.0));
  EXPECT_EQ(hp.pair.A(0.5), 0.25);
  EXPECT_TRUE(check_phi_contraction(hp.space, hp.pair, hp.ctrl).holds());

  const auto weighted = io::problem_from_json(fixture("halving_weighted.json"), kFixtures);
  const auto& wp = std::get<io::MapProblem<SampledIntervalSpace>>(weighted);
  EXPECT_EQ(wp.condition, std::optional<ContractionKind>(ContractionKind::weighted));
  ASSERT_TRUE(wp.ctrl.psi && wp.ctrl.beta);

  const auto ident = io::problem_from_json(fixture("cond3_identityA.json"), kFixtures);
  const auto& ip = std::get<io::MapProblem<FiniteGMS<Rational>>>(ident);
  EXPECT_FALSE(check_phi_contraction(ip.space, ip.pair, ip.ctrl).holds());

  const auto constant = io::problem_from_json(fixture("constant_four_point.json"), kFixtures);
  const auto& cp = std::get<io::MapProblem<FiniteGMS<Rational>>>(constant);
  EXPECT_EQ(cp.pair.A(0), cp.space.find("8/15"));
  EXPECT_EQ(cp.x0, std::optional<std::size_t>(cp.space.find("5/6")));
}

TEST(Problems, SelectorAndConditions) {
  json j = {{"space", "four_point.json"},
            {"A", {{"table", {"5/6", "5/6", "5/6", "5/6"}}}},
            {"B", {{"table", {"5/6", "5/6", "2/3", "7/12"}}}}};
  EXPECT_THROW(io::problem_from_json(j, kFixtures), MalformedInput);
  j["selector"] = {{"5/6", "2/3"}};
  const auto p = std::get<io::MapProblem<FiniteGMS<Rational>>>(io::problem_from_json(j, kFixtures));
  EXPECT_EQ(*p.pair.b_selector(0, 0), 1u);

  EXPECT_EQ(io::condition_from_string("17"), ContractionKind::linear);
  EXPECT_EQ(io::condition_from_string("weighted"), ContractionKind::weighted);
  EXPECT_THROW(io::condition_from_string("99"), MalformedInput);
  EXPECT_THROW(io::problem_from_json(json{{"A", "halving"}}), MalformedInput);
}

TEST(Reports, ValidationRoundTrip) {
  const auto s = example_gms_not_metric();
  const auto r = validate_gms(s);
  const json j = io::validation_report_to_json(s, r);
  EXPECT_EQ(j.begin().key(), "report");
  const auto back = io::validation_report_from_json(s, json::parse(j.dump()));
  EXPECT_EQ(back.valid_gms, r.valid_gms);
  EXPECT_EQ(back.triangle_violation_count, r.triangle_violation_count);
  ASSERT_EQ(back.triangle_violations.size(), r.triangle_violations.size());
  for (std::size_t i = 0; i < r.triangle_violations.size(); ++i) {
    EXPECT_EQ(back.triangle_violations[i].witness, r.triangle_violations[i].witness);
    EXPECT_EQ(back.triangle_violations[i].lhs, r.triangle_violations[i].lhs);
    EXPECT_EQ(back.triangle_violations[i].rhs, r.triangle_violations[i].rhs);
  }
  EXPECT_EQ(io::validation_report_to_json(s, back).dump(), j.dump());
}

TEST(Reports, ConditionRoundTrip) {
  const auto s = example_gms_not_metric();
  const auto pair = make_finite_pair(s, {0, 1, 2, 3}, {0, 1, 2, 3});
  const auto r = check_phi_contraction(s, pair, ControlFunctions<std::size_t, Rational>{});
  const json j = io::condition_report_to_json(s, r);
  const auto back = io::condition_report_from_json(s, json::parse(j.dump()));
  EXPECT_EQ(back.violation_count, 12u);
  EXPECT_EQ(io::condition_report_to_json(s, back).dump(), j.dump());
  json broken = j;
  broken["holds"] = true;
  EXPECT_THROW(io::condition_report_from_json(s, broken), MalformedInput);
}

TEST(Reports, TraceCsvAndSummary) {
  const SampledIntervalSpace iv(0, 1, 101);
  const auto t = jungck_iterate(iv, make_interval_pair(iv, CatalogMap::halving(), CatalogMap::identity()), 1.0);
  const auto csv = io::trace_csv(iv, t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,x_n,z_n,step_dist,skip_dist");
  EXPECT_NE(csv.find("\n0,1,0.5,,\n"), std::string::npos);
  EXPECT_NE(csv.find("\n1,0.5,0.25,0.25,\n"), std::string::npos);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), t.z.size() + 1);
  const auto sum = io::trace_summary_to_json(iv, t);
  EXPECT_EQ(sum["status"], "converged");
  EXPECT_EQ(sum["final_point"], 0.0);
}

TEST(Reports, PathologyProbes) {
  const auto s = io::gms_from_json(fixture("discontinuous.json"));
  const auto [seqs, opt] = io::probes_from_json(s, fixture("discontinuous_probes.json"));
  ASSERT_EQ(seqs.size(), 1u);
  EXPECT_EQ(seqs[0].points.size(), 64u);
  const auto j = io::pathologies_to_json(s, seqs, detect_pathologies(s, seqs, opt));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_TRUE(j[0]["convergent_not_cauchy"].get<bool>());
  EXPECT_EQ(j[0]["cauchy"]["witness_distance"], "1");
  EXPECT_EQ(j[0]["discontinuity"]["probe"], "1/2");
}

TEST(DynProgIo, ProblemAndSolutionRoundTrip) {
  const auto p = io::dp_problem_from_json(fixture("twostate.json"));
  EXPECT_EQ(p.states, (std::vector<std::string>{"s1", "s2"}));
  EXPECT_EQ(p.F.offset(0, 1), 0.1);
  const auto again = io::dp_problem_from_json(io::dp_problem_to_json(p));
  EXPECT_EQ(again.h, p.h);
  EXPECT_EQ(again.G, p.G);
  EXPECT_EQ(again.F.r, p.F.r);

  const auto sol = solve_system(p);
  const json sj = io::dp_solution_to_json(p, sol);
  const auto back = io::dp_solution_from_json(p, json::parse(sj.dump()));
  EXPECT_EQ(back.w, sol.w);
  EXPECT_EQ(back.z, sol.z);
  EXPECT_EQ(back.residual, sol.residual);
  EXPECT_EQ(io::dp_solution_to_json(p, back).dump(), sj.dump());
  const auto csv = io::dp_steps_csv(sol);
  EXPECT_EQ(csv.substr(0, 11), "k,sup_step\n");
}

TEST(DynProgIo, NamesAndErrors) {
  json j = fixture("twostate.json");
  j["G"] = json::parse(R"([["s1", "s2"], ["s2", "s1"]])");
  j["F"] = {{"kind", "clipped"}, {"c", 0.5}, {"lo", -1}, {"hi", 1}};
  j.erase("lipschitz_C");
  const auto p = io::dp_problem_from_json(j);
  EXPECT_EQ(p.G, (std::vector<std::vector<std::size_t>>{{0, 1}, {1, 0}}));
  EXPECT_EQ(p.lipschitz_C, 0.5);
  EXPECT_EQ(p.F.kind, RewardRule::Kind::clipped);

  j["G"] = json::parse(R"([["s1", "s9"], ["s2", "s1"]])");
  EXPECT_THROW(io::dp_problem_from_json(j), MalformedInput);
  j["G"] = {{0, 5}, {1, 0}};
  EXPECT_THROW(io::dp_problem_from_json(j), MalformedInput);
  j["G"] = {{0, 1}, {1, 0}};
  j["F"]["kind"] = "cubic";
  EXPECT_THROW(io::dp_problem_from_json(j), MalformedInput);
  j.erase("F");
  EXPECT_THROW(io::dp_problem_from_json(j), MalformedInput);
  EXPECT_THROW(io::dp_problem_from_json(fixture("four_point.json")), MalformedInput);
}
