#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mvlab/cli.hpp"
#include "mvlab/json_io.hpp"

using namespace mvlab;

namespace {

using GQ = GaussianRational;

struct CliResult {
  int status;
  std::string raw;
  Json doc;
};

CliResult invoke(const std::vector<std::string>& args) {
  std::string out;
  int status = run_cli_args(args, out);
  CliResult res{status, out, Json()};
  if (!out.empty() && out[0] == '{') res.doc = Json::parse(out);
  return res;
}

const char* kStandardCamera = R"([[1,0,0,0],[0,1,0,0],[0,0,1,0]])";

Json standard_camera_json() { return Json::parse(kStandardCamera); }

// [I | -t] for t = (1, 0, 0): center at (1:0:0:1)
Json shifted_camera_json() { return Json::parse(R"([[1,0,0,-1],[0,1,0,0],[0,0,1,0]])"); }

Json identity3_json() { return Json::parse(R"([[1,0,0],[0,1,0],[0,0,1]])"); }

}  // namespace

TEST_CASE("success envelope carries schema, command, and result") {
  std::string in = std::string(R"({"P1": )") + kStandardCamera +
                   R"(, "P2": [[1,0,0,-1],[0,1,0,0],[0,0,1,0]]})";
  CliResult res = invoke({"fundamental", in});
  CHECK(res.status == 0);
  REQUIRE(res.doc.is_object());
  CHECK(res.doc["schema"] == "mvlab/1");
  CHECK(res.doc["ok"] == true);
  CHECK(res.doc["command"] == "fundamental");
  REQUIRE(res.doc.contains("result"));
  const Json& result = res.doc["result"];
  CHECK(result.contains("F"));
  CHECK(result.contains("left_epipole"));
  CHECK(result.contains("right_epipole"));

  // pure translation along x: the form is the x-axis cross matrix and both
  // epipoles are the x direction
  Mat3<Rational> f = matrix_from_json<Mat3<Rational>>(result["F"], "F");
  Mat3<Rational> expected = Mat3<Rational>::Zero();
  expected(1, 2) = Rational(-1);
  expected(2, 1) = Rational(1);
  CHECK(proportional(f, expected));
  Vec3<Rational> left = vector_from_json<Vec3<Rational>>(result["left_epipole"], "e");
  Vec3<Rational> right = vector_from_json<Vec3<Rational>>(result["right_epipole"], "e");
  Vec3<Rational> ex;
  ex << Rational(1), Rational(0), Rational(0);
  CHECK(proportional(left, ex));
  CHECK(proportional(right, ex));
}

TEST_CASE("identical invocations produce byte-identical documents") {
  std::vector<std::string> args{"simulate", "--views", "3", "--points", "6", "--seed", "42"};
  CliResult a = invoke(args);
  CliResult b = invoke(args);
  CHECK(a.status == 0);
  CHECK(a.raw == b.raw);

  std::vector<std::string> cls{"classify-cones",
                               R"({"Q1": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,0]],
                                   "Q2": [[0,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]})"};
  CHECK(invoke(cls).raw == invoke(cls).raw);
}

TEST_CASE("classify-cones reports the two-conic class with its evidence") {
  CliResult res = invoke({"classify-cones",
                          R"({"Q1": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,0]],
                              "Q2": [[0,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]})"});
  REQUIRE(res.status == 0);
  const Json& result = res.doc["result"];
  CHECK(result["class"] == "TwoSmoothConics");
  CHECK(result["det_identically_zero"] == false);
  REQUIRE(result["det_coefficients"].size() == 5);
  CHECK(result["det_coefficients"][0] == "0");
  CHECK(result["det_coefficients"][1] == "1");
  CHECK(result["det_coefficients"][2] == "2");
  CHECK(result["det_coefficients"][3] == "1");
  CHECK(result["det_coefficients"][4] == "0");
  bool saw_double_root = false;
  for (const auto& r : result["roots"]) {
    if (r["multiplicity"] == 2) {
      saw_double_root = true;
      CHECK(r["rank"] == 2);
      CHECK(r["value"]["re"] == "-1");
      CHECK(r["value"]["im"] == "0");
      CHECK(r["at_infinity"] == false);
    }
  }
  CHECK(saw_double_root);

  // the float tower agrees on the class
  CliResult fl = invoke({"classify-cones", "--mode", "float",
                         R"({"Q1": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,0]],
                             "Q2": [[0,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]})"});
  REQUIRE(fl.status == 0);
  CHECK(fl.doc["result"]["class"] == "TwoSmoothConics");
}

TEST_CASE("twist reports the pinned pure-translation pair") {
  CliResult res = invoke({"twist", R"({"R": [[1,0,0],[0,1,0],[0,0,1]], "t": [1,0,0]})"});
  REQUIRE(res.status == 0);
  const Json& result = res.doc["result"];
  CHECK(result["degenerate"] == false);
  Mat4<Rational> rt = matrix_from_json<Mat4<Rational>>(result["R_t"], "R_t");
  Mat4<Rational> expected = Mat4<Rational>::Zero();
  expected(0, 0) = Rational(1);
  expected(1, 1) = Rational(-1);
  expected(2, 2) = Rational(-1);
  expected(3, 3) = Rational(1);
  CHECK(proportional(rt, expected));
  Mat4<Rational> h = matrix_from_json<Mat4<Rational>>(result["H"], "H");
  CHECK(h(3, 0) == Rational(-2));
  CHECK(h(3, 1) == Rational(0));
  CHECK(h(3, 2) == Rational(0));
  CHECK(h(3, 3) == Rational(1));
}

TEST_CASE("simulated scenes chain into membership and triangulation") {
  CliResult sim = invoke({"simulate", "--views", "3", "--points", "5", "--seed", "9"});
  REQUIRE(sim.status == 0);
  const Json& scene = sim.doc["result"];
  REQUIRE(scene["cameras"].size() == 3);
  REQUIRE(scene["points"].size() == 5);
  REQUIRE(scene["correspondences"].size() == 5);

  Json member = Json::object();
  member["cameras"] = scene["cameras"];
  member["correspondence"] = scene["correspondences"][0];
  CliResult mem = invoke({"membership", member.dump()});
  REQUIRE(mem.status == 0);
  CHECK(mem.doc["result"]["on_joint_image"] == true);
  CHECK(mem.doc["result"]["rank"] == 6);  // n + 3 for three views

  Json tri = Json::object();
  tri["cameras"] = scene["cameras"];
  tri["correspondence"] = scene["correspondences"][0];
  CliResult point = invoke({"triangulate", tri.dump()});
  REQUIRE(point.status == 0);
  Vec4<Rational> x = vector_from_json<Vec4<Rational>>(point.doc["result"]["point"], "point");
  Vec4<Rational> truth = vector_from_json<Vec4<Rational>>(scene["points"][0], "point");
  CHECK(proportional(x, truth));
}

TEST_CASE("seven correspondences recover the simulated epipolar form") {
  CliResult sim = invoke({"simulate", "--views", "2", "--points", "7", "--seed", "11"});
  REQUIRE(sim.status == 0);
  const Json& scene = sim.doc["result"];

  Json pair = Json::object();
  pair["P1"] = scene["cameras"][0];
  pair["P2"] = scene["cameras"][1];
  CliResult fm = invoke({"fundamental", pair.dump()});
  REQUIRE(fm.status == 0);
  Mat3<GQ> truth = matrix_from_json<Mat3<GQ>>(fm.doc["result"]["F"], "F");

  Json seven = Json::object();
  seven["correspondences"] = scene["correspondences"];
  CliResult sp = invoke({"seven-point", seven.dump()});
  REQUIRE(sp.status == 0);
  const Json& sols = sp.doc["result"]["solutions"];
  REQUIRE(!sols.empty());
  bool recovered = false;
  for (const auto& s : sols) {
    Mat3<GQ> cand = matrix_from_json<Mat3<GQ>>(s, "solution");
    if (proportional(cand, truth)) recovered = true;
  }
  CHECK(recovered);
}

TEST_CASE("equivalence of configurations through the command surface") {
  CliResult sim = invoke({"simulate", "--views", "2", "--points", "0", "--seed", "3"});
  REQUIRE(sim.status == 0);
  const Json& cams = sim.doc["result"]["cameras"];

  Json same = Json::object();
  same["first"] = cams;
  same["second"] = cams;
  CliResult eq = invoke({"equivalence", same.dump()});
  REQUIRE(eq.status == 0);
  CHECK(eq.doc["result"]["equivalent"] == true);
  CHECK(!eq.doc["result"]["homography"].is_null());

  CliResult other = invoke({"simulate", "--views", "2", "--points", "0", "--seed", "4"});
  Json diff = Json::object();
  diff["first"] = cams;
  diff["second"] = other.doc["result"]["cameras"];
  CliResult neq = invoke({"equivalence", diff.dump()});
  REQUIRE(neq.status == 0);
  CHECK(neq.doc["result"]["equivalent"] == false);
  CHECK(neq.doc["result"]["homography"].is_null());
}

TEST_CASE("constraint counts for a three-view configuration") {
  CliResult sim = invoke({"simulate", "--views", "3", "--points", "1", "--seed", "21"});
  REQUIRE(sim.status == 0);
  const Json& scene = sim.doc["result"];

  Json in = Json::object();
  in["cameras"] = scene["cameras"];
  in["correspondence"] = scene["correspondences"][0];
  CliResult res = invoke({"constraints", in.dump()});
  REQUIRE(res.status == 0);
  const Json& result = res.doc["result"];
  CHECK(result["bilinear_count"] == 3);
  CHECK(result["trilinear_count"] == 1);
  CHECK(result["trilinear"][0]["minor_count"] == 36);
  CHECK(result["values"]["all_vanish"] == true);
}

TEST_CASE("residual chains through its own output envelope") {
  Json in = Json::object();
  in["cameras"] = Json::array({standard_camera_json(), shifted_camera_json()});
  in["conics"] = Json::array({identity3_json(), identity3_json()});
  Json sc = Json::object();
  sc["plane"] = Json::parse("[0,0,0,1]");
  sc["quadric"] = Json::parse(R"([[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,0]])");
  in["space_conic"] = sc;

  CliResult res = invoke({"residual", in.dump()});
  REQUIRE(res.status == 0);
  RowVec4<Rational> plane = vector_from_json<RowVec4<Rational>>(
      res.doc["result"]["space_conic"]["plane"], "plane");
  RowVec4<Rational> expected;
  expected << Rational(-2), Rational(0), Rational(0), Rational(1);
  CHECK(proportional(plane, expected));
  CHECK(res.doc["result"]["space_conic"]["degeneracy"] == "smooth");

  // feeding the whole envelope back returns the original calibrating conic
  CliResult back = invoke({"residual", res.raw});
  REQUIRE(back.status == 0);
  RowVec4<Rational> restored = vector_from_json<RowVec4<Rational>>(
      back.doc["result"]["space_conic"]["plane"], "plane");
  RowVec4<Rational> w_plane;
  w_plane << Rational(0), Rational(0), Rational(0), Rational(1);
  CHECK(proportional(restored, w_plane));
}

TEST_CASE("fiber of two identity-conic views") {
  Json in = Json::object();
  in["cameras"] = Json::array(
      {standard_camera_json(), Json::parse(R"([[0,1,0,0],[0,0,1,0],[0,0,0,1]])")});
  in["conics"] = Json::array({identity3_json(), identity3_json()});
  CliResult res = invoke({"fiber", in.dump()});
  REQUIRE(res.status == 0);
  REQUIRE(res.doc["result"]["conics"].size() == 2);
  for (const auto& c : res.doc["result"]["conics"]) {
    CHECK(c["degeneracy"] == "smooth");
    CHECK(c["plane"].size() == 4);
  }
}

TEST_CASE("essential output feeds the characterization test") {
  CliResult e = invoke({"essential", R"({"R": [[1,0,0],[0,1,0],[0,0,1]], "t": [0,0,2]})"});
  REQUIRE(e.status == 0);
  Mat3<Rational> em = matrix_from_json<Mat3<Rational>>(e.doc["result"]["E"], "E");
  Mat3<Rational> expected = Mat3<Rational>::Zero();
  expected(0, 1) = Rational(-2);
  expected(1, 0) = Rational(2);
  CHECK(proportional(em, expected));

  CliResult check = invoke({"is-essential", e.raw});
  REQUIRE(check.status == 0);
  CHECK(check.doc["result"]["essential"] == true);
}

TEST_CASE("tolerance flag tightens the float essential test") {
  const char* in = R"({"E": [[0,0,0],[0,0,-1],[0,1.000000004,0]]})";
  CliResult loose = invoke({"is-essential", "--mode", "float", in});
  REQUIRE(loose.status == 0);
  CHECK(loose.doc["result"]["essential"] == true);
  CHECK(loose.doc["result"]["singular_values"].size() == 3);

  CliResult tight = invoke({"is-essential", "--mode", "float", "--tol", "1e-10", in});
  REQUIRE(tight.status == 0);
  CHECK(tight.doc["result"]["essential"] == false);
}

TEST_CASE("decompose requires the float tower and iac the exact one works") {
  const char* cam = R"({"camera": [[2,1,4,0],[0,3,5,0],[0,0,1,0]]})";
  CliResult exact = invoke({"decompose", cam});
  CHECK(exact.status == 1);
  CHECK(exact.doc["ok"] == false);

  CliResult fl = invoke({"decompose", "--mode", "float", cam});
  REQUIRE(fl.status == 0);
  Mat3<double> k = matrix_from_json<Mat3<double>>(fl.doc["result"]["K"], "K");
  CHECK(std::abs(k(0, 0) - 2.0) < 1e-10);
  CHECK(std::abs(k(0, 1) - 1.0) < 1e-10);
  CHECK(std::abs(k(1, 2) - 5.0) < 1e-10);

  CliResult iac = invoke({"iac", cam});
  REQUIRE(iac.status == 0);
  Mat3<Rational> conic = matrix_from_json<Mat3<Rational>>(iac.doc["result"]["conic"], "conic");
  Mat3<Rational> kk;
  kk << Rational(2), Rational(1), Rational(4), Rational(0), Rational(3), Rational(5), Rational(0),
      Rational(0), Rational(1);
  Mat3<Rational> expected = Mat3<Rational>((kk * kk.transpose()).inverse());
  CHECK(proportional(conic, expected));
}

TEST_CASE("unknown keys and malformed input are parse failures") {
  CliResult unknown = invoke({"fundamental",
                              R"({"P1": [[1,0,0,0],[0,1,0,0],[0,0,1,0]],
                                  "P2": [[1,0,0,-1],[0,1,0,0],[0,0,1,0]],
                                  "Px": 1})"});
  CHECK(unknown.status == 2);
  CHECK(unknown.doc["ok"] == false);
  CHECK(std::string(unknown.doc["error"]).find("unknown key") != std::string::npos);

  CliResult garbage = invoke({"fundamental", "{not json"});
  CHECK(garbage.status == 2);

  CliResult shape = invoke({"fundamental", R"({"P1": [[1,0],[0,1]], "P2": [[1,0],[0,1]]})"});
  CHECK(shape.status == 2);

  CliResult missing = invoke({"fundamental"});
  CHECK(missing.status == 2);

  CliResult bad_scalar =
      invoke({"fundamental", std::string(R"({"P1": )") + kStandardCamera +
                                 R"(, "P2": [["1/0",0,0,0],[0,1,0,0],[0,0,1,0]]})"});
  CHECK(bad_scalar.status == 2);
}

TEST_CASE("geometric failures exit with status one") {
  std::string same = std::string(R"({"P1": )") + kStandardCamera + R"(, "P2": )" +
                     kStandardCamera + "}";
  CliResult res = invoke({"fundamental", same});
  CHECK(res.status == 1);
  CHECK(res.doc["ok"] == false);
  CHECK(!std::string(res.doc["error"]).empty());

  CliResult float_fiber = invoke({"fiber", "--mode", "float", "{}"});
  CHECK(float_fiber.status == 1);
}

TEST_CASE("argument errors and help") {
  CliResult nonsense = invoke({"no-such-command"});
  CHECK(nonsense.status == 2);
  CHECK(nonsense.doc["ok"] == false);

  std::string out;
  int status = run_cli_args({"--help"}, out);
  CHECK(status == 0);
  CHECK(out.find("classify-cones") != std::string::npos);

  CliResult none = invoke({});
  CHECK(none.status == 2);
}

TEST_CASE("the out flag writes the document to a file") {
  const char* path = "/tmp/mvlab_cli_test_out.json";
  std::remove(path);
  CliResult res = invoke({"twist", "--out", path,
                          R"({"R": [[1,0,0],[0,1,0],[0,0,1]], "t": [1,0,0]})"});
  REQUIRE(res.status == 0);
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str() == res.raw);
  Json doc = Json::parse(buf.str());
  CHECK(doc["ok"] == true);
  std::remove(path);
}
