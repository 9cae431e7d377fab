// Command-line surface. Every subcommand reads one JSON document (file path,
// "-" for stdin, or inline "{...}"), delegates to the corresponding library
// operation over the requested scalar tower, and emits exactly one JSON
// document: {"schema": "mvlab/1", "ok": true, "command": ..., "result": ...}
// on success and {"schema": "mvlab/1", "ok": false, "error": ...} otherwise.
// Identical requests produce byte-identical output.

#include "mvlab/cli.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "mvlab/json_io.hpp"
#include "mvlab/simulate.hpp"

namespace mvlab {
namespace {

struct Request {
  std::string command;
  std::string input;          // path, "-" for stdin, or inline JSON
  bool exact = true;
  std::optional<double> tol;  // command-specific default when absent
  std::uint64_t seed = 0;
  std::string out_path;
  int views = 2;   // simulate only
  int points = 8;  // simulate only
};

double tol_or(const Request& req, double fallback) { return req.tol ? *req.tol : fallback; }

Json load_input(const std::string& spec) {
  if (spec.empty())
    fail(Err::Parse, "this command needs an input document (path, \"-\", or inline JSON)");
  std::string text;
  if (spec[0] == '{') {
    text = spec;
  } else if (spec == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    text = buf.str();
  } else {
    std::ifstream in(spec, std::ios::binary);
    if (!in) fail(Err::Parse, "cannot open input file '" + spec + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Err::Parse, std::string("invalid JSON input: ") + e.what());
  }
  // A previous invocation's output document is accepted directly: the
  // envelope is peeled off and the payload used as the input.
  if (doc.is_object() && doc.contains("schema") && doc["schema"] == "mvlab/1") {
    if (!doc.contains("result"))
      fail(Err::Parse, "input is an mvlab/1 envelope without a \"result\" payload");
    return doc["result"];
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Shared parsers and serializers

template <class S>
std::vector<Camera<S>> parse_cameras(const Json& j, const char* what, double tol) {
  if (!j.is_array() || j.empty())
    fail(Err::Parse, std::string(what) + ": expected a nonempty array of 3x4 camera matrices");
  std::vector<Camera<S>> cams;
  cams.reserve(j.size());
  for (const auto& item : j) cams.push_back(Camera<S>(matrix_from_json<Mat34<S>>(item, what), tol));
  return cams;
}

template <class S>
Correspondence<S> parse_correspondence(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    fail(Err::Parse, std::string(what) + ": expected a nonempty array of image points");
  std::vector<HPoint2<S>> pts;
  pts.reserve(j.size());
  for (const auto& item : j) pts.push_back(HPoint2<S>(vector_from_json<Vec3<S>>(item, what)));
  return Correspondence<S>(std::move(pts));
}

template <class S>
std::vector<Conic2<S>> parse_conics(const Json& j, const char* what, double tol) {
  if (!j.is_array() || j.empty())
    fail(Err::Parse, std::string(what) + ": expected a nonempty array of 3x3 conic matrices");
  std::vector<Conic2<S>> conics;
  conics.reserve(j.size());
  for (const auto& item : j) conics.push_back(Conic2<S>(matrix_from_json<Mat3<S>>(item, what), tol));
  return conics;
}

template <class S>
SpaceConic<S> parse_space_conic(const Json& j, const char* what, double tol) {
  // "degeneracy" is derived data; it is tolerated on input (so output
  // documents round-trip) and recomputed, never trusted.
  expect_keys(j, what, {"plane", "quadric", "degeneracy"});
  RowVec4<S> plane = vector_from_json<RowVec4<S>>(require_key(j, what, "plane"), what);
  Quadric3<S> q(matrix_from_json<Mat4<S>>(require_key(j, what, "quadric"), what), tol);
  return SpaceConic<S>(std::move(plane), std::move(q), tol);
}

template <class S>
Json space_conic_to_json(const SpaceConic<S>& c) {
  Json out = Json::object();
  out["plane"] = vector_to_json(c.plane);
  out["quadric"] = matrix_to_json(c.quadric.m);
  out["degeneracy"] = to_string(c.degeneracy);
  return out;
}

// Projective roots: exact values live in the Gaussian tower ("value" is null
// for the point at infinity and for roots the tower cannot represent); the
// numeric approximation is always reported.
Json root_to_json(const PolyRoot& r) {
  Json out = Json::object();
  out["value"] = (r.exact && !r.root.at_infinity) ? scalar_to_json(r.root.value) : Json();
  out["at_infinity"] = r.root.at_infinity;
  Json approx = Json::object();
  approx["re"] = r.approx.real();
  approx["im"] = r.approx.imag();
  out["approx"] = approx;
  out["multiplicity"] = r.multiplicity;
  out["exact"] = r.exact;
  out["real"] = r.real;
  return out;
}

template <class S>
bool value_is_zero(const S& v, double tol) {
  if constexpr (kIsExact<S>) {
    (void)tol;
    return v.is_zero();
  } else {
    return std::abs(v) <= tol;
  }
}

// ---------------------------------------------------------------------------
// Command handlers

template <class S>
Json cmd_fundamental(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "fundamental", {"P1", "P2"});
  Camera<S> p1(matrix_from_json<Mat34<S>>(require_key(in, "fundamental", "P1"), "P1"), tol);
  Camera<S> p2(matrix_from_json<Mat34<S>>(require_key(in, "fundamental", "P2"), "P2"), tol);
  BilinearForm<S> f = fundamental_from_pair(p1, p2, tol);
  Epipoles<S> e = epipoles(f, tol);
  Json out = Json::object();
  out["F"] = matrix_to_json(f.a);
  out["left_epipole"] = vector_to_json(e.left.v);
  out["right_epipole"] = vector_to_json(e.right.v);
  return out;
}

template <class S>
Json cmd_seven_point(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "seven-point", {"correspondences"});
  const Json& arr = require_key(in, "seven-point", "correspondences");
  if (!arr.is_array()) fail(Err::Parse, "seven-point: \"correspondences\" must be an array");
  std::vector<Correspondence<S>> corrs;
  corrs.reserve(arr.size());
  for (const auto& item : arr) corrs.push_back(parse_correspondence<S>(item, "correspondence"));
  SevenPointResult<S> res = seven_point(corrs, tol);
  Json out = Json::object();
  out["F1"] = matrix_to_json(res.f1);
  out["F2"] = matrix_to_json(res.f2);
  Json roots = Json::array();
  for (const auto& r : res.roots) roots.push_back(root_to_json(r));
  out["roots"] = std::move(roots);
  Json sols = Json::array();
  for (const auto& s : res.solutions) sols.push_back(matrix_to_json(s));
  out["solutions"] = std::move(sols);
  return out;
}

template <class S>
Json cmd_triangulate(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "triangulate", {"cameras", "correspondence"});
  CameraConfig<S> config(parse_cameras<S>(require_key(in, "triangulate", "cameras"), "cameras", tol));
  Correspondence<S> corr =
      parse_correspondence<S>(require_key(in, "triangulate", "correspondence"), "correspondence");
  HPoint3<S> x = triangulate(config, corr, tol);
  Json out = Json::object();
  out["point"] = vector_to_json(x.v);
  return out;
}

template <class S>
Json cmd_resect(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "resect", {"world", "image"});
  const Json& jw = require_key(in, "resect", "world");
  const Json& ji = require_key(in, "resect", "image");
  if (!jw.is_array() || !ji.is_array())
    fail(Err::Parse, "resect: \"world\" and \"image\" must be arrays of points");
  std::vector<HPoint3<S>> world;
  world.reserve(jw.size());
  for (const auto& item : jw) world.push_back(HPoint3<S>(vector_from_json<Vec4<S>>(item, "world")));
  std::vector<HPoint2<S>> image;
  image.reserve(ji.size());
  for (const auto& item : ji) image.push_back(HPoint2<S>(vector_from_json<Vec3<S>>(item, "image")));
  Camera<S> p = resect(world, image, tol);
  Json out = Json::object();
  out["camera"] = matrix_to_json(p.m);
  return out;
}

template <class S>
Json cmd_membership(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "membership", {"cameras", "correspondence"});
  CameraConfig<S> config(parse_cameras<S>(require_key(in, "membership", "cameras"), "cameras", tol));
  Correspondence<S> corr =
      parse_correspondence<S>(require_key(in, "membership", "correspondence"), "correspondence");
  MembershipResult res = membership_rank(config, corr, tol);
  Json out = Json::object();
  out["rank"] = res.rank;
  out["on_joint_image"] = res.on_joint_image;
  return out;
}

template <class S>
Json cmd_equivalence(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "equivalence", {"first", "second"});
  CameraConfig<S> a(parse_cameras<S>(require_key(in, "equivalence", "first"), "first", tol));
  CameraConfig<S> b(parse_cameras<S>(require_key(in, "equivalence", "second"), "second", tol));
  std::optional<Homography<S>> h = recover_homography(a, b, tol);
  Json out = Json::object();
  out["equivalent"] = h.has_value();
  out["homography"] = h ? matrix_to_json(h->m) : Json();
  return out;
}

template <class S>
Json cmd_constraints(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "constraints", {"cameras", "correspondence"});
  CameraConfig<S> config(parse_cameras<S>(require_key(in, "constraints", "cameras"), "cameras", tol));
  ConstraintSet<S> cs = constraint_polynomials(config, tol);
  Json out = Json::object();
  out["bilinear_count"] = cs.bilinear.size();
  out["trilinear_count"] = cs.trilinear.size();
  Json bil = Json::array();
  for (const auto& b : cs.bilinear) {
    Json item = Json::object();
    item["views"] = Json::array({b.view_i, b.view_j});
    item["form"] = matrix_to_json(b.form.a);
    bil.push_back(std::move(item));
  }
  out["bilinear"] = std::move(bil);
  Json tri = Json::array();
  for (const auto& t : cs.trilinear) {
    Json item = Json::object();
    item["views"] = Json::array({t.view_i, t.view_j, t.view_k});
    item["minor_count"] = t.row_choices.size();
    tri.push_back(std::move(item));
  }
  out["trilinear"] = std::move(tri);
  if (in.contains("correspondence")) {
    Correspondence<S> corr = parse_correspondence<S>(in["correspondence"], "correspondence");
    if (corr.views() != config.size())
      fail(Err::Precondition, "correspondence length must match camera count");
    bool all_vanish = true;
    Json bv = Json::array();
    for (const auto& b : cs.bilinear) {
      S v = evaluate_bilinear(b, corr);
      all_vanish = all_vanish && value_is_zero(v, tol);
      bv.push_back(scalar_to_json(v));
    }
    Json tv = Json::array();
    for (const auto& t : cs.trilinear) {
      Json one = Json::array();
      for (const S& v : evaluate_trilinear(config, t, corr)) {
        all_vanish = all_vanish && value_is_zero(v, tol);
        one.push_back(scalar_to_json(v));
      }
      tv.push_back(std::move(one));
    }
    Json values = Json::object();
    values["bilinear"] = std::move(bv);
    values["trilinear"] = std::move(tv);
    values["all_vanish"] = all_vanish;
    out["values"] = std::move(values);
  }
  return out;
}

Json cmd_decompose(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "decompose", {"camera"});
  Camera<double> p(matrix_from_json<Mat34<double>>(require_key(in, "decompose", "camera"), "camera"),
                   tol);
  CalibrationDecomposition d = decompose_camera(p, tol);
  Json out = Json::object();
  out["K"] = matrix_to_json(d.k);
  out["R"] = matrix_to_json(d.r);
  out["C"] = vector_to_json(d.c);
  out["det_negative"] = d.det_negative;
  return out;
}

template <class S>
Json cmd_iac(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "iac", {"camera"});
  Camera<S> p(matrix_from_json<Mat34<S>>(require_key(in, "iac", "camera"), "camera"), tol);
  Conic2<S> conic = image_of_absolute_conic(p, tol);
  Json out = Json::object();
  out["conic"] = matrix_to_json(conic.m);
  return out;
}

template <class S>
Json cmd_essential(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "essential", {"R", "t"});
  Mat3<S> r = matrix_from_json<Mat3<S>>(require_key(in, "essential", "R"), "R");
  Vec3<S> t = vector_from_json<Vec3<S>>(require_key(in, "essential", "t"), "t");
  EssentialMatrix<S> e = essential_from_pose(r, t, tol);
  Json out = Json::object();
  out["E"] = matrix_to_json(e.m);
  return out;
}

template <class S>
Json cmd_is_essential(const Json& in, const Request& req) {
  const double tol = tol_or(req, kEssentialTol);
  expect_keys(in, "is-essential", {"E"});
  Mat3<S> e = matrix_from_json<Mat3<S>>(require_key(in, "is-essential", "E"), "E");
  Json out = Json::object();
  out["essential"] = is_essential(e, tol);
  if constexpr (!kIsExact<S>) {
    Eigen::JacobiSVD<Eigen::Matrix3d> dec{Eigen::Matrix3d(e)};
    out["singular_values"] = vector_to_json(dec.singularValues());
  }
  return out;
}

template <class S>
Json cmd_classify_cones(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "classify-cones", {"Q1", "Q2"});
  Quadric3<S> q1(matrix_from_json<Mat4<S>>(require_key(in, "classify-cones", "Q1"), "Q1"), tol);
  Quadric3<S> q2(matrix_from_json<Mat4<S>>(require_key(in, "classify-cones", "Q2"), "Q2"), tol);
  PencilClassification<S> cls = pencil_classify(q1, q2, tol);
  Json out = Json::object();
  out["class"] = to_string(cls.cls);
  out["det_identically_zero"] = cls.det_identically_zero;
  Json coeffs = Json::array();
  for (const S& c : cls.det_form.c) coeffs.push_back(scalar_to_json(c));
  out["det_coefficients"] = std::move(coeffs);
  Json roots = Json::array();
  for (const auto& ev : cls.roots) {
    Json r = root_to_json(ev.root);
    r["rank"] = ev.rank;
    roots.push_back(std::move(r));
  }
  out["roots"] = std::move(roots);
  return out;
}

Json cmd_fiber(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "fiber", {"cameras", "conics"});
  CameraConfig<Rational> config(
      parse_cameras<Rational>(require_key(in, "fiber", "cameras"), "cameras", tol));
  std::vector<Conic2<Rational>> conics =
      parse_conics<Rational>(require_key(in, "fiber", "conics"), "conics", tol);
  DecalibrationFiber<Rational> fiber = decalibration_fiber(config, conics, tol);
  Json out = Json::object();
  Json cs = Json::array();
  for (const auto& c : fiber.conics) cs.push_back(space_conic_to_json(c));
  out["conics"] = std::move(cs);
  return out;
}

// Output shape equals input shape, so `residual` invocations chain: applying
// the command to its own output returns the original datum.
Json cmd_residual(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "residual", {"cameras", "conics", "space_conic"});
  CameraConfig<Rational> config(
      parse_cameras<Rational>(require_key(in, "residual", "cameras"), "cameras", tol));
  std::vector<Conic2<Rational>> conics =
      parse_conics<Rational>(require_key(in, "residual", "conics"), "conics", tol);
  SpaceConic<Rational> sc =
      parse_space_conic<Rational>(require_key(in, "residual", "space_conic"), "space_conic", tol);
  CalibratedConfig<Rational> cal(config, conics, sc, tol);
  CalibratedConfig<Rational> res = residual_calibration(cal, tol);
  Json out = Json::object();
  Json cams = Json::array();
  for (const auto& cam : res.config.cameras) cams.push_back(matrix_to_json(cam.m));
  out["cameras"] = std::move(cams);
  Json cs = Json::array();
  for (const auto& c : res.image_conics) cs.push_back(matrix_to_json(c.m));
  out["conics"] = std::move(cs);
  out["space_conic"] = space_conic_to_json(res.space_conic);
  return out;
}

template <class S>
Json cmd_twist(const Json& in, const Request& req) {
  const double tol = tol_or(req, kDefaultTol);
  expect_keys(in, "twist", {"R", "t"});
  Mat3<S> r = matrix_from_json<Mat3<S>>(require_key(in, "twist", "R"), "R");
  Vec3<S> t = vector_from_json<Vec3<S>>(require_key(in, "twist", "t"), "t");
  TwistedPair<S> tp = twisted_pair(r, t, tol);
  Json out = Json::object();
  out["R_t"] = matrix_to_json(tp.r_t);
  out["P2_twisted"] = matrix_to_json(tp.p2_twisted.m);
  out["H"] = matrix_to_json(tp.h.m);
  out["degenerate"] = tp.degenerate;
  return out;
}

Json cmd_simulate(const Request& req) {
  if (req.views < 1 || req.views > 8) fail(Err::Precondition, "simulate needs 1 <= views <= 8");
  if (req.points < 0 || req.points > 10000)
    fail(Err::Precondition, "simulate needs 0 <= points <= 10000");
  SplitMix64 rng(req.seed);
  Scene scene = random_scene(rng, req.views, req.points);
  Json out = Json::object();
  Json cams = Json::array();
  for (const auto& cam : scene.config.cameras) cams.push_back(matrix_to_json(cam.m));
  out["cameras"] = std::move(cams);
  Json pts = Json::array();
  for (const auto& x : scene.points) pts.push_back(vector_to_json(x));
  out["points"] = std::move(pts);
  Json corrs = Json::array();
  for (const auto& corr : scene.correspondences) {
    Json one = Json::array();
    for (const auto& p : corr.points) one.push_back(vector_to_json(p.v));
    corrs.push_back(std::move(one));
  }
  out["correspondences"] = std::move(corrs);
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch

// Operations whose output is certified by exact arithmetic (pencil splitting
// over the Gaussian closure, kernel dimensions) refuse the float tower;
// RQ factorization needs square roots and refuses the exact one.
Json dispatch(const Request& req) {
  if (req.command == "simulate") return cmd_simulate(req);
  const Json in = load_input(req.input);
  const bool exact = req.exact;
  if (req.command == "fundamental")
    return exact ? cmd_fundamental<Rational>(in, req) : cmd_fundamental<double>(in, req);
  if (req.command == "seven-point")
    return exact ? cmd_seven_point<Rational>(in, req) : cmd_seven_point<double>(in, req);
  if (req.command == "triangulate")
    return exact ? cmd_triangulate<Rational>(in, req) : cmd_triangulate<double>(in, req);
  if (req.command == "resect")
    return exact ? cmd_resect<Rational>(in, req) : cmd_resect<double>(in, req);
  if (req.command == "membership")
    return exact ? cmd_membership<Rational>(in, req) : cmd_membership<double>(in, req);
  if (req.command == "equivalence")
    return exact ? cmd_equivalence<Rational>(in, req) : cmd_equivalence<double>(in, req);
  if (req.command == "constraints")
    return exact ? cmd_constraints<Rational>(in, req) : cmd_constraints<double>(in, req);
  if (req.command == "decompose") {
    if (exact)
      fail(Err::Precondition, "decompose needs --mode float: RQ factorization leaves the rational tower");
    return cmd_decompose(in, req);
  }
  if (req.command == "iac") return exact ? cmd_iac<Rational>(in, req) : cmd_iac<double>(in, req);
  if (req.command == "essential")
    return exact ? cmd_essential<Rational>(in, req) : cmd_essential<double>(in, req);
  if (req.command == "is-essential")
    return exact ? cmd_is_essential<Rational>(in, req) : cmd_is_essential<double>(in, req);
  if (req.command == "classify-cones")
    return exact ? cmd_classify_cones<Rational>(in, req) : cmd_classify_cones<double>(in, req);
  if (req.command == "fiber") {
    if (!exact) fail(Err::Precondition, "fiber needs --mode exact");
    return cmd_fiber(in, req);
  }
  if (req.command == "residual") {
    if (!exact) fail(Err::Precondition, "residual needs --mode exact");
    return cmd_residual(in, req);
  }
  if (req.command == "twist")
    return exact ? cmd_twist<Rational>(in, req) : cmd_twist<double>(in, req);
  fail(Err::Internal, "unknown command '" + req.command + "'");
}

}  // namespace

int run_cli_args(const std::vector<std::string>& args, std::string& output) {
  CLI::App app{"mvlab: cameras, joint images, epipolar algebra, calibrating conics, and cone pencils"};
  app.require_subcommand(1);

  Request req;
  std::string mode = "exact";
  double tol_value = kDefaultTol;

  struct CommandSpec {
    const char* name;
    const char* desc;
  };
  static const CommandSpec kCommands[] = {
      {"fundamental", "fundamental form and epipoles of a camera pair"},
      {"seven-point", "all fundamental forms through seven correspondences"},
      {"triangulate", "world point of a member correspondence"},
      {"resect", "camera from six or more world/image pairs"},
      {"membership", "joint-image rank test for a correspondence"},
      {"equivalence", "projective equivalence of two camera configurations"},
      {"constraints", "bilinear and trilinear constraints of a configuration"},
      {"decompose", "K/R/C factorization of a camera (float mode)"},
      {"iac", "image of the absolute conic under a camera"},
      {"essential", "essential matrix of a relative pose (R, t)"},
      {"is-essential", "test the equal-singular-values characterization"},
      {"classify-cones", "intersection class of a pencil of two quadric cones"},
      {"fiber", "all calibrating conics of cameras with image conics (exact mode)"},
      {"residual", "the other calibrating conic of a two-view datum (exact mode)"},
      {"twist", "twisted pair of a relative pose"},
      {"simulate", "deterministic integer scene generator"},
  };

  for (const CommandSpec& spec : kCommands) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.desc);
    sub->add_option("--mode", mode, "scalar backend")
        ->check(CLI::IsMember({"exact", "float"}))
        ->capture_default_str();
    sub->add_option("--tol", tol_value, "numeric tolerance override");
    sub->add_option("--seed", req.seed, "generator seed")->capture_default_str();
    sub->add_option("--out", req.out_path, "write the JSON document to this path instead of stdout");
    if (std::string(spec.name) == "simulate") {
      sub->add_option("--views", req.views, "number of cameras")->capture_default_str();
      sub->add_option("--points", req.points, "number of world points")->capture_default_str();
    } else {
      sub->add_option("input", req.input, "input document: path, \"-\" for stdin, or inline JSON");
    }
  }

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("mvlab");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      std::ostringstream help;
      app.exit(e, help, help);
      output = help.str();
      return 0;
    }
    Json env = Json::object();
    env["schema"] = "mvlab/1";
    env["ok"] = false;
    env["error"] = std::string("argument error: ") + e.what();
    output = env.dump(2) + "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  req.command = sub->get_name();
  req.exact = mode == "exact";
  if (sub->count("--tol") > 0) req.tol = tol_value;

  Json env = Json::object();
  env["schema"] = "mvlab/1";
  int status = 0;
  try {
    Json result = dispatch(req);
    env["ok"] = true;
    env["command"] = req.command;
    env["result"] = std::move(result);
  } catch (const Error& e) {
    env["ok"] = false;
    env["error"] = std::string(e.what());
    status = e.code() == Err::Parse ? 2 : 1;
  } catch (const std::exception& e) {
    env["ok"] = false;
    env["error"] = std::string("internal error: ") + e.what();
    status = 1;
  }
  output = env.dump(2) + "\n";

  if (!req.out_path.empty()) {
    std::ofstream f(req.out_path, std::ios::binary);
    if (!f) {
      Json ferr = Json::object();
      ferr["schema"] = "mvlab/1";
      ferr["ok"] = false;
      ferr["error"] = "cannot open output file '" + req.out_path + "'";
      output = ferr.dump(2) + "\n";
      return 1;
    }
    f << output;
  }
  return status;
}

int run_cli(int argc, const char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<size_t>(argc > 0 ? argc - 1 : 0));
  bool to_file = false;
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
    if (args.back() == "--out" || args.back().rfind("--out=", 0) == 0) to_file = true;
  }
  std::string output;
  int status = run_cli_args(args, output);
  if (!to_file) std::cout << output;
  return status;
}

}  // namespace mvlab
