// tests/morphable-test.cc

// Copyright 2026  The avfront Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <set>

#include "doctest.h"
#include "test-util.h"

using namespace avfront;
using namespace avfront::testing;

namespace {

DepthGrid Grid(int size, double pixel) {
  DepthGrid g;
  g.width = g.height = size;
  g.camera = Camera::Centered(size, size, 0.0, 0.0, pixel);
  return g;
}

// Two triangles covering the square [-h, h]^2 at height z.
void AddSquare(double h, double z, Eigen::Matrix3Xd *v, std::vector<Triangle> *tris) {
  const int base = static_cast<int>(v->cols());
  v->conservativeResize(3, base + 4);
  v->col(base + 0) << -h, -h, z;
  v->col(base + 1) << h, -h, z;
  v->col(base + 2) << h, h, z;
  v->col(base + 3) << -h, h, z;
  tris->push_back({base, base + 1, base + 2});
  tris->push_back({base, base + 2, base + 3});
}

double Pearson(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  const Eigen::VectorXd x = a.array() - a.mean(), y = b.array() - b.mean();
  return x.dot(y) / (x.norm() * y.norm());
}

Eigen::VectorXd RandomCoefficients(int K, uint64_t seed, double sd) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Eigen::VectorXd s(K);
  for (int k = 0; k < K; ++k) s(k) = sd * n01(rng);
  return s;
}

}  // namespace

TEST_CASE("fit shape: mean landmarks give zero coefficients") {
  const DeformableModel &m = ToyModel68();
  CHECK(FitShape(m.MeanLandmarks(), m, 0.1).s.norm() < 1e-8);
}

TEST_CASE("fit shape recovers known coefficients, seed 11") {
  const DeformableModel m = GenerateToyModel(11, 900, 8, 68);
  ShapeCoefficients truth{RandomCoefficients(8, 11, 0.05)};
  const LandmarkSet y = m.Landmarks(AsVertices(ReconstructVertices(m, truth)));
  const ShapeCoefficients fit = FitShape(y, m, 0.0);
  CHECK((fit.s - truth.s).cwiseAbs().maxCoeff() < 1e-8);
  // Generic least-squares oracle on the stacked landmark rows.
  Eigen::MatrixXd B(3 * m.J(), m.K());
  Eigen::VectorXd r(3 * m.J());
  for (int j = 0; j < m.J(); ++j) {
    const int v = m.landmark_index()[j];
    B.middleRows(3 * j, 3) = m.basis().middleRows(3 * v, 3);
    r.segment(3 * j, 3) = y[j] - m.mean().segment(3 * v, 3);
  }
  const Eigen::VectorXd ls = B.colPivHouseholderQr().solve(r);
  CHECK((B * ls - r).norm() < 1e-10);
  CHECK((ls - fit.s).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("fit shape: regularization trades data fit for prior energy") {
  const DeformableModel &m = ToyModel68();
  ShapeCoefficients truth{RandomCoefficients(m.K(), 12, 0.05)};
  const LandmarkSet y = m.Landmarks(AsVertices(ReconstructVertices(m, truth)));
  auto energy = [&](const ShapeCoefficients &s) {
    return (s.s.array().square() / m.eigenvalues().array()).sum();
  };
  auto residual = [&](const ShapeCoefficients &s) {
    return (m.Landmarks(AsVertices(ReconstructVertices(m, s))).points() - y.points()).squaredNorm();
  };
  const auto lo = FitShape(y, m, 1e-6), hi = FitShape(y, m, 1e2);
  CHECK(energy(hi) < energy(lo));
  CHECK(residual(hi) > residual(lo));
}

TEST_CASE("fit shape: under-determined without regularization") {
  const DeformableModel m = GenerateToyModel(2, 400, 20, 4);
  try {
    FitShape(m.MeanLandmarks(), m, 0.0);
    FAIL("expected SingularSystem");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kSingularSystem);
  }
  CHECK(FitShape(m.MeanLandmarks(), m, 1e-3).s.norm() < 1e-10);
}

TEST_CASE("joint pose and shape refinement recovers a posed face") {
  const DeformableModel &m = ToyModel68();
  ShapeCoefficients truth{RandomCoefficients(m.K(), 21, 1.0)};
  for (int k = 0; k < m.K(); ++k) truth.s(k) *= 0.3 * std::sqrt(m.eigenvalues()(k));
  const LandmarkSet frontal = m.Landmarks(AsVertices(ReconstructVertices(m, truth)));
  Pose head;
  head.scale = 1.15;
  head.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(0.35, Eigen::Vector3d(0.2, 1.0, 0.1).normalized()));
  head.translation = Eigen::Vector3d(0.05, -0.03, 0.02);
  const LandmarkSet observed = ApplyPose(head, frontal);

  Pose start;
  RobustFit fit;
  std::tie(start, fit) = EstimatePose(observed, m.MeanLandmarks());
  const ShapeCoefficients s0 = FitShape(ApplyPose(start, observed), m);
  const std::vector<double> ones(m.J(), 1.0);
  const PoseShapeFit r = RefinePoseAndShape(observed, m, ones, start, s0);
  CHECK(r.objective < 1e-20);
  CHECK((r.shape.s - truth.s).cwiseAbs().maxCoeff() < 1e-8);
  const LandmarkSet back = ApplyPose(r.pose, observed);
  CHECK((back.points() - frontal.points()).cwiseAbs().maxCoeff() < 1e-9);
  const Pose expect = head.Inverse();
  CHECK(r.pose.scale == doctest::Approx(expect.scale).epsilon(1e-9));
  CHECK(r.pose.rotation.angularDistance(expect.rotation) < 1e-9);

  // With a prior the objective still drops from the alternating start.
  const PoseShapeFit reg = RefinePoseAndShape(observed, m, ones, start, s0, 1e-3);
  double start_obj = 0.0;
  const LandmarkSet fs = ApplyPose(start, observed);
  const LandmarkSet model_fit = m.Landmarks(AsVertices(ReconstructVertices(m, s0)));
  start_obj += (fs.points() - model_fit.points()).squaredNorm();
  start_obj += 1e-3 * (s0.s.array().square() / m.eigenvalues().array()).sum();
  CHECK(reg.objective <= start_obj);
}

TEST_CASE("reconstruct vertices") {
  const DeformableModel &m = ToyModel68();
  ShapeCoefficients zero{Eigen::VectorXd::Zero(m.K())};
  CHECK(ReconstructVertices(m, zero) == m.mean());
  ShapeCoefficients e1{Eigen::VectorXd::Unit(m.K(), 0)};
  CHECK((ReconstructVertices(m, e1) - (m.mean() + m.basis().col(0))).norm() < 1e-14);
  const ShapeCoefficients s1{RandomCoefficients(m.K(), 1, 1.0)}, s2{RandomCoefficients(m.K(), 2, 1.0)};
  const double a = 0.7, b = -1.9;
  const ShapeCoefficients mix{a * s1.s + b * s2.s};
  const Eigen::VectorXd lhs = ReconstructVertices(m, mix);
  const Eigen::VectorXd rhs = a * ReconstructVertices(m, s1) + b * ReconstructVertices(m, s2) -
                              (a + b - 1.0) * m.mean();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  ShapeCoefficients wrong{Eigen::VectorXd::Zero(m.K() + 1)};
  CHECK_THROWS_AS(ReconstructVertices(m, wrong), Error);
}

TEST_CASE("depth rendering") {
  const DepthGrid g = Grid(40, 0.1);
  SUBCASE("flat square") {
    Eigen::Matrix3Xd v(3, 0);
    std::vector<Triangle> t;
    AddSquare(1.0, 5.0, &v, &t);
    const DepthMap d = RenderFrontalDepth(v, t, g);
    int interior = 0;
    for (int r = 0; r < g.height; ++r)
      for (int c = 0; c < g.width; ++c) {
        const Eigen::Vector2d p = g.camera.Unproject(c, r);
        if (std::abs(p.x()) < 0.95 && std::abs(p.y()) < 0.95) {
          ++interior;
          REQUIRE(d.Present(c, r));
          CHECK(d.At(c, r) == doctest::Approx(5.0).epsilon(1e-12));
        }
        if (std::abs(p.x()) > 1.05 || std::abs(p.y()) > 1.05) CHECK(!d.Present(c, r));
      }
    CHECK(interior > 0);
  }
  SUBCASE("z-buffer keeps the nearer surface") {
    Eigen::Matrix3Xd v(3, 0);
    std::vector<Triangle> t;
    AddSquare(1.0, 1.0, &v, &t);
    AddSquare(0.5, 3.0, &v, &t);
    const DepthMap d = RenderFrontalDepth(v, t, g);
    for (int r = 0; r < g.height; ++r)
      for (int c = 0; c < g.width; ++c) {
        const Eigen::Vector2d p = g.camera.Unproject(c, r);
        if (std::abs(p.x()) < 0.45 && std::abs(p.y()) < 0.45) CHECK(d.At(c, r) == doctest::Approx(3.0).epsilon(1e-12));
        else if (std::abs(p.x()) > 0.55 && std::abs(p.x()) < 0.95 && std::abs(p.y()) < 0.95)
          CHECK(d.At(c, r) == doctest::Approx(1.0).epsilon(1e-12));
      }
  }
  SUBCASE("tilted plane") {
    Eigen::Matrix3Xd v(3, 3);
    auto plane = [](double x, double y) { return 0.3 * x - 0.7 * y + 2.0; };
    v.col(0) << -1.5, -1.5, plane(-1.5, -1.5);
    v.col(1) << 1.5, -1.2, plane(1.5, -1.2);
    v.col(2) << 0.1, 1.6, plane(0.1, 1.6);
    const std::vector<Triangle> t = {{0, 1, 2}};
    const DepthMap d = RenderFrontalDepth(v, t, g);
    int covered = 0;
    for (int r = 0; r < g.height; ++r)
      for (int c = 0; c < g.width; ++c)
        if (d.Present(c, r)) {
          ++covered;
          const Eigen::Vector2d p = g.camera.Unproject(c, r);
          CHECK(std::abs(d.At(c, r) - plane(p.x(), p.y())) < 1e-10);
        }
    CHECK(covered > 100);
  }
  SUBCASE("empty mesh") {
    try {
      RenderFrontalDepth(Eigen::Matrix3Xd(3, 0), {}, g);
      FAIL("expected EmptyMesh");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kEmptyMesh);
    }
  }
}

TEST_CASE("frontal warp") {
  const DepthGrid g = Grid(48, 0.05);
  Eigen::Matrix3Xd v(3, 0);
  std::vector<Triangle> t;
  AddSquare(2.0, 0.5, &v, &t);
  const DepthMap d = RenderFrontalDepth(v, t, g);
  Image checker(48, 48);
  for (int r = 0; r < 48; ++r)
    for (int c = 0; c < 48; ++c) checker.at(c, r) = ((c / 4 + r / 4) % 2) ? 0.9 : 0.1;

  SUBCASE("identity pose reproduces the input") {
    const Image out = WarpToFrontal(checker, Pose::Identity(), d);
    for (int r = 0; r < 48; ++r)
      for (int c = 0; c < 48; ++c)
        if (d.Present(c, r)) CHECK(out.at(c, r) == doctest::Approx(checker.at(c, r)).epsilon(1e-12));
  }
  SUBCASE("in-plane translation shifts the image") {
    // Frontal point P samples input point P - t, i.e. a shift of -t in model units.
    Pose p;
    p.translation = Eigen::Vector3d(3 * 0.05, -2 * 0.05, 0.0);
    const Image out = WarpToFrontal(checker, p, d);
    for (int r = 4; r < 44; ++r)
      for (int c = 4; c < 44; ++c) CHECK(out.at(c, r) == doctest::Approx(checker.at(c - 3, r - 2)).epsilon(1e-9));
  }
  SUBCASE("30 degree yaw face: landmark reprojection") {
    const DeformableModel &m = ToyModel68();
    const DepthGrid fg = Grid(96, 3.2 / 96);
    const Pose yaw = PoseFromEuler(30.0, 0.0, 0.0, 1.0, Eigen::Vector3d::Zero());
    SynthOptions opts;
    opts.grid = fg;
    const std::vector<Pose> motion = {yaw};
    const auto seq = SynthesizeSequence(m, Eigen::MatrixXd::Zero(1, 2), motion, 3, opts);
    const Pose front = yaw.Inverse();
    const DepthMap depth = RenderFrontalDepth(AsVertices(m.mean()), m.triangles(), fg);
    std::vector<double> err;
    for (int j = 0; j < m.J(); ++j) {
      const Eigen::Vector2d fp = fg.camera.Project(seq.unposed[0][j]);
      const int c = static_cast<int>(std::lround(fp.x())), r = static_cast<int>(std::lround(fp.y()));
      const auto q = FrontalToInput(front, depth, fg.camera, c, r);
      if (!q) continue;
      // Expected input pixel: the posed landmark shifted by the rounding offset.
      const Eigen::Vector2d target = fg.camera.Project(seq.clean[0][j]);
      err.push_back((*q - target).norm());
    }
    REQUIRE(err.size() > 40);
    std::nth_element(err.begin(), err.begin() + err.size() / 2, err.end());
    CHECK(err[err.size() / 2] < 1.0);
    // The warped image is defined on covered pixels and stays within [0, 1].
    const Image out = WarpToFrontal(seq.frames[0], front, depth);
    for (double x : out.pixels()) CHECK((x >= 0.0 && x <= 1.0));
  }
}

TEST_CASE("lip crop") {
  std::vector<Eigen::Vector2d> box = {{20, 30}, {40, 30}, {40, 38}, {20, 38}};
  SUBCASE("constant image") {
    const LipCrop c = CropLipRegion(Image(64, 64, 0.4), box);
    CHECK(c.pixels.size() == 67u * 67u);
    for (double x : c.pixels) CHECK(std::abs(x) < 1e-12);
  }
  SUBCASE("gradient image") {
    Image img(64, 64);
    for (int r = 0; r < 64; ++r)
      for (int col = 0; col < 64; ++col) img.at(col, r) = 0.01 * col + 0.003 * r;
    const LipCrop c = CropLipRegion(img, box);
    const double centre = c.at(33, 33) * c.stddev + c.mean;
    CHECK(centre == doctest::Approx(0.01 * 30 + 0.003 * 34).epsilon(1e-9));
    double m = 0.0, s = 0.0;
    for (double x : c.pixels) m += x;
    m /= c.pixels.size();
    for (double x : c.pixels) s += (x - m) * (x - m);
    CHECK(std::abs(m) < 1e-6);
    CHECK(std::abs(std::sqrt(s / c.pixels.size()) - 1.0) < 1e-6);
  }
  SUBCASE("landmarks outside the frame") {
    box[0] = Eigen::Vector2d(-5, 30);
    try {
      CropLipRegion(Image(64, 64, 0.4), box);
      FAIL("expected LandmarksOutOfFrame");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kLandmarksOutOfFrame);
    }
  }
}

TEST_CASE("toy model") {
  const DeformableModel a = GenerateToyModel(5, 800, 10, 68), b = GenerateToyModel(5, 800, 10, 68);
  CHECK(a.mean() == b.mean());
  CHECK(a.basis() == b.basis());
  CHECK(a.eigenvalues() == b.eigenvalues());
  CHECK(a.landmark_index() == b.landmark_index());
  CHECK(a.triangles() == b.triangles());
  CHECK(a.J() == 68);
  CHECK(std::set<int>(a.landmark_index().begin(), a.landmark_index().end()).size() == 68u);
  const Eigen::Matrix3Xd v = AsVertices(a.mean());
  for (const auto &t : a.triangles())
    CHECK((v.col(t[1]) - v.col(t[0])).cross(v.col(t[2]) - v.col(t[0])).norm() > 1e-12);
  for (int k = 0; k < a.K(); ++k) CHECK(std::abs(a.basis().col(k).norm() - 1.0) < 1e-12);
  for (int k = 1; k < a.K(); ++k) CHECK(a.eigenvalues()(k) <= a.eigenvalues()(k - 1));
}

TEST_CASE("model json round trip") {
  TempDir dir("model");
  const DeformableModel a = GenerateToyModel(5, 500, 6, 68);
  SaveModelJson(dir.str("m.json"), a);
  const DeformableModel b = LoadModelJson(dir.str("m.json"));
  CHECK(a.mean() == b.mean());
  CHECK(a.basis() == b.basis());
  CHECK(a.triangles() == b.triangles());
}

TEST_CASE("pgm round trip") {
  TempDir dir("pgm");
  Image img(5, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 5; ++c) img.at(c, r) = (r * 5 + c) / 255.0;
  WritePgm(dir.str("a.pgm"), img);
  const Image back = ReadPgm(dir.str("a.pgm"));
  REQUIRE(back.width() == 5);
  REQUIRE(back.height() == 3);
  for (size_t i = 0; i < img.pixels().size(); ++i)
    CHECK(back.pixels()[i] == doctest::Approx(img.pixels()[i]).epsilon(1e-12));
}

TEST_CASE("synthesize sequence") {
  const DeformableModel &m = ToyModel68();
  SynthOptions opts;
  opts.grid = Grid(64, 3.2 / 64);
  SUBCASE("static face renders identical frames") {
    const std::vector<Pose> motion(3, Pose::Identity());
    const auto seq = SynthesizeSequence(m, Eigen::MatrixXd::Zero(3, 2), motion, 1, opts);
    REQUIRE(seq.frames.size() == 3u);
    CHECK(seq.frames[0].pixels() == seq.frames[1].pixels());
    CHECK(seq.frames[1].pixels() == seq.frames[2].pixels());
  }
  SUBCASE("upper-lip trace follows articulation") {
    const int T = 20;
    Eigen::MatrixXd art(T, 2);
    for (int t = 0; t < T; ++t) art.row(t) << 0.02 * std::sin(0.5 * t), 0.01 * std::cos(0.3 * t);
    const std::vector<Pose> motion(T, Pose::Identity());
    const auto seq = SynthesizeSequence(m, art, motion, 1, SynthOptions{});
    const int j = MouthLayoutFor(68).upper_lip, v = m.landmark_index()[j];
    const Eigen::Vector3d b0 = m.basis().block<3, 1>(3 * v, 0), b1 = m.basis().block<3, 1>(3 * v, 1);
    for (int t = 0; t < T; ++t) {
      const double expect = m.mean()(3 * v + 1) + art(t, 0) * b0.y() + art(t, 1) * b1.y();
      CHECK(std::abs(seq.unposed[t][j].y() - expect) < 1e-12);
      CHECK((seq.observed[t].points() - seq.unposed[t].points()).norm() < 1e-12);
    }
    CHECK(seq.observed.size() == static_cast<size_t>(T));
  }
}

TEST_CASE("lip geometry and features") {
  const MouthLayout layout = MouthLayoutFor(68);
  const MouthShape mouth = MouthFromLandmarks(ToyModel68().MeanLandmarks(), layout);
  SUBCASE("static mouth has zero differences") {
    const std::vector<MouthShape> frames(10, mouth);
    const Eigen::MatrixXd f = LipFeatures(frames, 8);
    CHECK(f.rows() == 10);
    CHECK(f.cols() == 8);
    CHECK(f.rightCols(4).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("area scales quadratically") {
    MouthShape big = mouth;
    for (auto &p : big.outer) p *= 2.0;
    for (auto &p : big.inner) p *= 2.0;
    CHECK(MeasureLip(big).area == doctest::Approx(4.0 * MeasureLip(mouth).area).epsilon(1e-12));
    CHECK(MeasureLip(big).width == doctest::Approx(2.0 * MeasureLip(mouth).width).epsilon(1e-12));
  }
  SUBCASE("zero padding beyond the base features") {
    std::vector<MouthShape> frames(5, mouth);
    for (int t = 0; t < 5; ++t)
      for (auto &p : frames[t].inner) p.y() *= 1.0 + 0.1 * t;
    const Eigen::MatrixXd f = LipFeatures(frames, 12);
    CHECK(f.rightCols(4).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(f.col(2).mean()) < 1e-12);
  }
  SUBCASE("frontalized features track articulation, seed 13") {
    ExperimentConfig cfg;
    cfg.seed = 13;
    const DeformableModel model = CorpusModel(cfg);
    const Utterance u = SynthesizeUtterance(cfg, model, Split::kTest, 0);
    const UtteranceFeatures f = ComputeFeatures(u, model, cfg);
    const double r_front = Pearson(f.frontal.col(1), u.articulation.col(0));
    const double r_raw = Pearson(f.head_motion.col(1), u.articulation.col(0));
    CHECK(r_front >= 0.9);
    CHECK(r_raw < r_front);
  }
  SUBCASE("too few features") { CHECK_THROWS_AS(LipFeatures(std::vector<MouthShape>(3, mouth), 3), Error); }
}
