#include "ctrect/scene.h"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ctrect/errors.h"

namespace ctrect {

namespace {

constexpr int kMaxAttempts = 100;
constexpr int kBoundarySamplesPerSide = 24;
constexpr int kCoverageGrid = 24;
// Margin kept between the imaged patch and the image border, in pixels.
constexpr double kBorderMarginPx = 5.0;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct ImageBounds {
  Vec2 lo;
  Vec2 hi;

  bool contains(const Vec2& p) const {
    return p.x() >= lo.x() && p.y() >= lo.y() && p.x() <= hi.x() && p.y() <= hi.y();
  }
};

ImageBounds normalized_bounds(const ImageFrame& image, double margin_px) {
  const Vec2 lo = (Vec2(margin_px, margin_px) - image.center) * image.norm_scale;
  const Vec2 hi =
      (Vec2(image.width - margin_px, image.height - margin_px) - image.center) * image.norm_scale;
  return {lo, hi};
}

// Distorted image of a plane point, or nullopt when behind the camera or
// without a real distorted preimage.
std::optional<Vec2> image_of(const CameraPlane& cam, const Vec2& X) {
  const Vec3 x = cam.P * Vec3(X.x(), X.y(), 1.0);
  if (!(x.z() > kEpsW * x.norm())) return std::nullopt;
  return try_distort(Vec2(x.head<2>() / x.z()), cam.lambda);
}

bool patch_inside(const CameraPlane& cam, double half, const ImageBounds& bounds) {
  for (int side = 0; side < 4; ++side) {
    for (int k = 0; k <= kBoundarySamplesPerSide; ++k) {
      const double t = -half + 2.0 * half * k / kBoundarySamplesPerSide;
      Vec2 X;
      switch (side) {
        case 0: X = Vec2(t, -half); break;
        case 1: X = Vec2(half, t); break;
        case 2: X = Vec2(-t, half); break;
        default: X = Vec2(-half, -t); break;
      }
      const auto x = image_of(cam, X);
      if (!x || !bounds.contains(*x)) return false;
    }
  }
  return true;
}

// Fraction of image sample points whose preimage falls on the patch.
double coverage(const CameraPlane& cam, double half, const ImageFrame& image) {
  const Mat3 Pinv = cam.P.inverse();
  int hits = 0;
  for (int i = 0; i < kCoverageGrid; ++i) {
    for (int j = 0; j < kCoverageGrid; ++j) {
      const Vec2 px((i + 0.5) * image.width / kCoverageGrid,
                    (j + 0.5) * image.height / kCoverageGrid);
      const Vec2 xd = (px - image.center) * image.norm_scale;
      const Vec3 x = undistort(xd, cam.lambda);
      if (!(x.z() > 0.0)) continue;
      const Vec3 X = Pinv * x;
      if (!(std::abs(X.z()) > kEpsW * X.norm())) continue;
      // A point behind the camera back-projects with the opposite sign.
      if (X.z() * (cam.P.row(2).dot(X)) <= 0.0) continue;
      const Vec2 Xp = X.head<2>() / X.z();
      if (std::abs(Xp.x()) <= half && std::abs(Xp.y()) <= half) ++hits;
    }
  }
  return static_cast<double>(hits) / (kCoverageGrid * kCoverageGrid);
}

Mat3 make_camera(double f, const Eigen::Matrix3d& R, const Vec3& t) {
  Mat3 Rt;
  Rt.col(0) = R.col(0);
  Rt.col(1) = R.col(1);
  Rt.col(2) = t;
  return Eigen::DiagonalMatrix<double, 3>(f, f, 1.0) * Rt;
}

// Smallest camera distance (along the viewing ray through `offset`) at which
// the whole patch images inside the bounds; nullopt if none in range.
std::optional<CameraPlane> fit_distance(double f, const Eigen::Matrix3d& R, const Vec2& offset,
                                        double lambda, double half, const ImageBounds& bounds) {
  auto camera_at = [&](double d) {
    return CameraPlane{make_camera(f, R, Vec3(offset.x() * d, offset.y() * d, d)), lambda};
  };
  double lo = 0.05 * half;
  double hi = 1000.0 * half;
  if (!patch_inside(camera_at(hi), half, bounds)) return std::nullopt;
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (patch_inside(camera_at(mid), half, bounds)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return camera_at(hi);
}

bool circle_degenerate(std::span<const Vec2> pts) {
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  double rsum = 0.0;
  for (const Vec2& p : pts) {
    const double r = p.norm();
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    rsum += r;
  }
  const double mean = rsum / pts.size();
  return (rmax - rmin) < 0.01 * mean;
}

}  // namespace

void SceneConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kSchemaViolation, "invalid scene config: " + what);
  };
  if (width <= 0 || height <= 0) fail("image size must be positive");
  if (!(focal_min_mm > 0.0) || !(focal_max_mm >= focal_min_mm)) fail("focal range");
  if (!lambda.fixed && !(lambda.hi >= lambda.lo)) fail("lambda interval");
  if (!(sigma_px >= 0.0)) fail("sigma must be >= 0");
  if (frames < 1) fail("frames must be >= 1");
  if (directions != 1 && directions != 2) fail("directions must be 1 or 2");
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0)) fail("outlier fraction in [0,1)");
  if (!(plane_extent > 0.0)) fail("plane extent");
  if (!(min_coverage >= 0.0 && min_coverage <= 1.0)) fail("coverage");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(master) ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

double normalized_focal(double focal_mm, const ImageFrame& image) {
  // A 35mm-equivalent focal length images a 36mm-wide sensor across the full
  // image width, which spans width * norm_scale normalized units.
  return focal_mm / 36.0 * (image.width * image.norm_scale);
}

Mat3 GroundTruthScene::conjugate_translation(int direction_id) const {
  return ctrect::conjugate_translation(camera.P, translations.at(direction_id));
}

PointH GroundTruthScene::vanishing_point(int direction_id) const {
  const Mat3 H = conjugate_translation(direction_id);
  // H - I = u l^T with l3 = 1.
  return PointH(Vec3(H.col(2) - Vec3::UnitZ()));
}

RectifyModel GroundTruthScene::ground_truth_model() const {
  RectifyModel m;
  m.l = l_gt;
  m.lambda = camera.lambda;
  for (int d = 0; d < static_cast<int>(translations.size()); ++d) {
    m.vps.push_back({d, vanishing_point(d)});
  }
  m.provenance = "ground_truth";
  return m;
}

LineH gt_vanishing_line(const Mat3& P) {
  const double scale = P.norm();
  if (!(std::abs(P.determinant()) > 1e-12 * scale * scale * scale)) {
    throw Error(ErrorCode::kSingularCamera, "camera homography is singular");
  }
  const Vec3 l = P.inverse().transpose() * Vec3::UnitZ();
  return LineH(l).normalized_l3(1e-8);
}

std::vector<Correspondence> add_noise(std::span<const Correspondence> corrs, double sigma_px,
                                      const ImageFrame& image, std::mt19937_64& rng) {
  std::vector<Correspondence> out(corrs.begin(), corrs.end());
  if (sigma_px == 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma_px * image.norm_scale);
  for (Correspondence& c : out) {
    c.pd.h.x() += noise(rng);
    c.pd.h.y() += noise(rng);
    c.pd_prime.h.x() += noise(rng);
    c.pd_prime.h.y() += noise(rng);
  }
  return out;
}

OutlierInjection inject_outliers(std::span<const Correspondence> corrs, double fraction,
                                 const ImageFrame& image, std::mt19937_64& rng) {
  OutlierInjection out;
  out.corrs.assign(corrs.begin(), corrs.end());
  out.mask.assign(corrs.size(), false);

  std::vector<int> units;
  for (const Correspondence& c : corrs) {
    if (std::find(units.begin(), units.end(), c.frame_id) == units.end()) {
      units.push_back(c.frame_id);
    }
  }
  const auto n_out = static_cast<std::size_t>(std::lround(fraction * units.size()));
  std::shuffle(units.begin(), units.end(), rng);
  units.resize(std::min(n_out, units.size()));
  std::sort(units.begin(), units.end());

  const ImageBounds bounds = normalized_bounds(image, 0.0);
  for (std::size_t k = 0; k < out.corrs.size(); ++k) {
    Correspondence& c = out.corrs[k];
    if (!std::binary_search(units.begin(), units.end(), c.frame_id)) continue;
    c.pd_prime = PointH(uniform(rng, bounds.lo.x(), bounds.hi.x()),
                        uniform(rng, bounds.lo.y(), bounds.hi.y()), 1.0);
    out.mask[k] = true;
  }
  return out;
}

GroundTruthScene gen_scene(const SceneConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(derive_seed(seed, 0));
  GroundTruthScene scene;
  scene.config = cfg;
  scene.seed = seed;
  scene.image = ImageFrame::make(cfg.width, cfg.height);
  const double half = 0.5 * cfg.plane_extent;
  const ImageBounds bounds = normalized_bounds(scene.image, kBorderMarginPx);
  constexpr double kPi = std::numbers::pi;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const double lambda =
        cfg.lambda.fixed ? cfg.lambda.value : uniform(rng, cfg.lambda.lo, cfg.lambda.hi);
    const double f = normalized_focal(uniform(rng, cfg.focal_min_mm, cfg.focal_max_mm), scene.image);

    // Tilt the plane about a random in-plane axis, spin it about its normal.
    const double tilt = uniform(rng, 0.0, cfg.max_tilt_deg) * kPi / 180.0;
    const double axis = uniform(rng, 0.0, 2.0 * kPi);
    const double spin = uniform(rng, 0.0, 2.0 * kPi);
    const Eigen::Matrix3d R =
        (Eigen::AngleAxisd(tilt, Vec3(std::cos(axis), std::sin(axis), 0.0)) *
         Eigen::AngleAxisd(spin, Vec3::UnitZ()))
            .toRotationMatrix();
    const Vec2 offset(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));

    const auto cam = fit_distance(f, R, offset, lambda, half, bounds);
    if (!cam) continue;
    if (coverage(*cam, half, scene.image) < cfg.min_coverage) continue;

    LineH l;
    try {
      l = gt_vanishing_line(cam->P);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(l.h.z()) < 1e-3 * l.h.norm()) continue;

    // Translations: 10-40% of the patch extent in a random direction; two
    // directions are kept at least 30 degrees apart.
    std::vector<Vec2> translations;
    const double base_angle = uniform(rng, 0.0, 2.0 * kPi);
    for (int d = 0; d < cfg.directions; ++d) {
      const double angle = d == 0 ? base_angle : base_angle + uniform(rng, kPi / 6.0, 5.0 * kPi / 6.0);
      const double mag = uniform(rng, 0.1, 0.4) * cfg.plane_extent;
      translations.emplace_back(mag * std::cos(angle), mag * std::sin(angle));
    }

    std::vector<SceneFrame> frames;
    std::vector<Correspondence> clean;
    bool ok = true;
    for (int k = 0; k < cfg.frames && ok; ++k) {
      const int dir = k % cfg.directions;
      const Vec2& U = translations[dir];
      bool placed = false;
      for (int tries = 0; tries < kMaxAttempts && !placed; ++tries) {
        const double size = uniform(rng, 0.01, 0.05) * cfg.plane_extent;
        const double a = uniform(rng, 0.0, 2.0 * kPi);
        const double b = a + uniform(rng, kPi / 3.0, 2.0 * kPi / 3.0);
        const double ratio = uniform(rng, 0.7, 1.3);
        const Vec2 e1 = size * Vec2(std::cos(a), std::sin(a));
        const Vec2 e2 = size * ratio * Vec2(std::cos(b), std::sin(b));
        const Vec2 o(uniform(rng, -half, half), uniform(rng, -half, half));
        const std::array<Vec2, 3> pts{o, o + e1, o + e2};

        std::array<Vec2, 6> img;
        bool inside = true;
        for (int j = 0; j < 3 && inside; ++j) {
          for (int s = 0; s < 2 && inside; ++s) {
            const Vec2 X = pts[j] + (s == 1 ? U : Vec2::Zero());
            inside = std::abs(X.x()) <= half && std::abs(X.y()) <= half;
            if (!inside) break;
            const auto x = image_of(*cam, X);
            inside = x.has_value() && bounds.contains(*x);
            if (inside) img[2 * j + s] = *x;
          }
        }
        if (!inside || circle_degenerate(img)) continue;

        frames.push_back({pts, dir});
        for (int j = 0; j < 3; ++j) {
          Correspondence c;
          c.pd = PointH(img[2 * j].x(), img[2 * j].y(), 1.0);
          c.pd_prime = PointH(img[2 * j + 1].x(), img[2 * j + 1].y(), 1.0);
          c.frame_id = k;
          c.direction_id = dir;
          c.scale_class = ScaleClass::kUnit;
          clean.push_back(c);
        }
        placed = true;
      }
      ok = placed;
    }
    if (!ok) continue;

    scene.camera = *cam;
    scene.l_gt = l;
    scene.translations = std::move(translations);
    scene.frames = std::move(frames);
    scene.clean = std::move(clean);

    std::mt19937_64 noise_rng(derive_seed(seed, 1));
    const auto noisy = add_noise(scene.clean, cfg.sigma_px, scene.image, noise_rng);
    std::mt19937_64 outlier_rng(derive_seed(seed, 2));
    OutlierInjection inj = inject_outliers(noisy, cfg.outlier_fraction, scene.image, outlier_rng);
    scene.noisy = std::move(inj.corrs);
    scene.outlier = std::move(inj.mask);
    return scene;
  }
  throw Error(ErrorCode::kRetryExhausted, "scene generation exhausted its attempts");
}

}  // namespace ctrect
