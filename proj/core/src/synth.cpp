#include "motion_barcode/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "motion_barcode/errors.hpp"
#include "motion_barcode/rng.hpp"

namespace motion_barcode {

namespace {

constexpr std::uint64_t kNoiseStream = 0x4e01;
constexpr std::uint64_t kTextureStream = 0x7e47;

// Sequential draws from the counter hash, keyed on a seed and a purpose tag.
class Draws {
 public:
  Draws(std::uint64_t seed, std::uint64_t tag) : seed_(seed), tag_(tag) {}

  double unit() { return hash_unit(counter_hash(seed_, tag_, 0, 0, counter_++)); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(hash_below(counter_hash(seed_, tag_, 0, 0, counter_++),
                                            static_cast<std::uint32_t>(hi - lo + 1)));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t tag_;
  std::uint64_t counter_ = 0;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return counter_hash(seed, a, b, 0, 0x5eed);
}

// Pixel bounding box of a world-space square under an affine map, clipped.
void footprint_bounds(const Affine2D& m, Point2 center, double half, int width, int height, int& x0, int& y0,
                      int& x1, int& y1) {
  double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
  for (int sx = -1; sx <= 1; sx += 2) {
    for (int sy = -1; sy <= 1; sy += 2) {
      const Point2 q = m.apply({center.x + sx * half, center.y + sy * half});
      lo_x = std::min(lo_x, q.x);
      lo_y = std::min(lo_y, q.y);
      hi_x = std::max(hi_x, q.x);
      hi_y = std::max(hi_y, q.y);
    }
  }
  x0 = std::max(0, static_cast<int>(std::floor(lo_x)) - 1);
  y0 = std::max(0, static_cast<int>(std::floor(lo_y)) - 1);
  x1 = std::min(width - 1, static_cast<int>(std::ceil(hi_x)) + 1);
  y1 = std::min(height - 1, static_cast<int>(std::ceil(hi_y)) + 1);
}

// Calls fn(p) for every pixel whose centre maps inside the actor's box.
template <typename Fn>
void for_each_covered(const SceneSpec& scene, const Affine2D& m, const Affine2D& inv, Point2 center, Fn fn) {
  const double half = scene.actor_extent / 2.0;
  int x0, y0, x1, y1;
  footprint_bounds(m, center, half, scene.width, scene.height, x0, y0, x1, y1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Point2 w = inv.apply({x + 0.5, y + 0.5});
      if (std::abs(w.x - center.x) <= half && std::abs(w.y - center.y) <= half) {
        fn(static_cast<std::size_t>(y) * scene.width + x);
      }
    }
  }
}

ActorTrack random_track(Draws& rng, const SceneGenParams& p, double tempo) {
  const double half = p.actor_extent / 2.0;
  const double margin = half + p.wander_radius;
  const Point2 home{rng.uniform(margin, p.world_size - margin), rng.uniform(margin, p.world_size - margin)};
  ActorTrack track;
  Point2 pos = home;
  int t = 0;
  bool moving = rng.unit() < 0.5;
  track.keys.push_back({0, pos});
  while (t < p.duration) {
    const int base = moving ? rng.uniform_int(4, 16) : rng.uniform_int(3, 14);
    const int len = std::max(1, static_cast<int>(std::lround(base * tempo)));
    if (moving) {
      // Head somewhere else inside the wander disc.
      Point2 next = pos;
      for (int attempt = 0; attempt < 16; ++attempt) {
        const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double r = p.wander_radius * std::sqrt(rng.unit());
        next = {home.x + r * std::cos(ang), home.y + r * std::sin(ang)};
        if (std::hypot(next.x - pos.x, next.y - pos.y) > 1.0) break;
      }
      pos = next;
    }
    t += len;
    track.keys.push_back({t, pos});
    moving = !moving;
  }
  return track;
}

std::string scene_name(const PlannedClip& c) {
  const auto cut = c.clip_id.find("_v");
  return cut == std::string::npos ? c.clip_id : c.clip_id.substr(0, cut);
}

}  // namespace

bool ActorTrack::moving(int t) const {
  for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
    if (t >= keys[k].frame && t < keys[k + 1].frame) {
      return keys[k].position.x != keys[k + 1].position.x || keys[k].position.y != keys[k + 1].position.y;
    }
  }
  return false;
}

Point2 ActorTrack::position(double t) const {
  if (keys.empty()) return {};
  if (t <= keys.front().frame) return keys.front().position;
  for (std::size_t k = 0; k + 1 < keys.size(); ++k) {
    const auto& a = keys[k];
    const auto& b = keys[k + 1];
    if (t < b.frame) {
      const double u = (t - a.frame) / static_cast<double>(b.frame - a.frame);
      return {a.position.x + u * (b.position.x - a.position.x), a.position.y + u * (b.position.y - a.position.y)};
    }
  }
  return keys.back().position;
}

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) throw InvalidArgument("canvas must be non-empty");
  if (duration < 2) throw InvalidArgument("scene duration must be >= 2");
  if (actors.empty()) throw InvalidArgument("scene needs at least one actor");
  if (!(actor_extent > 0.0)) throw InvalidArgument("actor_extent must be positive");
  for (const auto& a : actors) {
    if (a.keys.empty()) throw InvalidArgument("actor without key frames");
    for (std::size_t k = 1; k < a.keys.size(); ++k) {
      if (a.keys[k].frame <= a.keys[k - 1].frame) throw InvalidArgument("key frames must increase strictly");
    }
  }
}

Affine2D Affine2D::inverse() const {
  const double det = determinant();
  if (det == 0.0 || !std::isfinite(det)) throw InvalidArgument("degenerate view transform");
  Affine2D r;
  r.a = e / det;
  r.b = -b / det;
  r.d = -d / det;
  r.e = a / det;
  r.c = -(r.a * c + r.b * f);
  r.f = -(r.d * c + r.e * f);
  return r;
}

double Affine2D::rotation_degrees() const {
  return std::atan2(d, a) * 180.0 / std::numbers::pi;
}

void ViewSpec::validate() const {
  (void)world_to_image.inverse();
  if (!(noise_p >= 0.0 && noise_p < 0.5)) throw InvalidArgument("noise_p must lie in [0, 0.5)");
  for (const auto& r : occluders) {
    if (r.w < 0 || r.h < 0) throw InvalidArgument("occluder with negative size");
  }
}

MotionMaskSequence render_view(const SceneSpec& scene, const ViewSpec& view, std::string clip_id) {
  scene.validate();
  view.validate();
  const Affine2D inv = view.world_to_image.inverse();
  MotionMaskSequence out;
  out.width = scene.width;
  out.height = scene.height;
  out.clip_id = std::move(clip_id);
  const std::size_t pixels = out.pixel_count();
  out.masks.assign(static_cast<std::size_t>(scene.duration), std::vector<std::uint8_t>(pixels, 0));

  for (int t = 0; t < scene.duration; ++t) {
    auto& mask = out.masks[static_cast<std::size_t>(t)];
    for (const auto& actor : scene.actors) {
      if (!actor.moving(t)) continue;
      for_each_covered(scene, view.world_to_image, inv, actor.position(t), [&](std::size_t p) { mask[p] = 1; });
    }
    for (const auto& r : view.occluders) {
      for (int y = std::max(0, r.y); y < std::min(scene.height, r.y + r.h); ++y) {
        for (int x = std::max(0, r.x); x < std::min(scene.width, r.x + r.w); ++x) {
          mask[static_cast<std::size_t>(y) * scene.width + x] = 0;
        }
      }
    }
    if (view.noise_p > 0.0) {
      for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
          if (hash_unit(counter_hash(view.rng_seed, x, y, t, kNoiseStream)) < view.noise_p) {
            auto& bit = mask[static_cast<std::size_t>(y) * scene.width + x];
            bit ^= 1;
          }
        }
      }
    }
  }
  return out;
}

FrameSequence render_view_frames(const SceneSpec& scene, const ViewSpec& view, std::string clip_id) {
  scene.validate();
  view.validate();
  const Affine2D inv = view.world_to_image.inverse();
  FrameSequence out;
  out.width = scene.width;
  out.height = scene.height;
  out.clip_id = std::move(clip_id);
  const std::size_t pixels = out.pixel_count();

  std::vector<std::uint8_t> background(pixels);
  for (int y = 0; y < scene.height; ++y) {
    for (int x = 0; x < scene.width; ++x) {
      const int checker = ((x / 8 + y / 8) & 1) ? 30 : 0;
      const int grain = static_cast<int>(hash_below(counter_hash(view.rng_seed, x, y, 0, kTextureStream), 9));
      background[static_cast<std::size_t>(y) * scene.width + x] = static_cast<std::uint8_t>(40 + checker + grain);
    }
  }

  out.frames.reserve(static_cast<std::size_t>(scene.duration));
  for (int t = 0; t < scene.duration; ++t) {
    auto frame = background;
    for (std::size_t k = 0; k < scene.actors.size(); ++k) {
      const auto shade = static_cast<std::uint8_t>(180 + (k * 23) % 70);
      for_each_covered(scene, view.world_to_image, inv, scene.actors[k].position(t),
                       [&](std::size_t p) { frame[p] = shade; });
    }
    for (const auto& r : view.occluders) {
      for (int y = std::max(0, r.y); y < std::min(scene.height, r.y + r.h); ++y) {
        for (int x = std::max(0, r.x); x < std::min(scene.width, r.x + r.w); ++x) {
          frame[static_cast<std::size_t>(y) * scene.width + x] = 128;
        }
      }
    }
    out.frames.push_back(std::move(frame));
  }
  return out;
}

SceneSpec random_scene(std::uint64_t seed, const SceneGenParams& params) {
  if (params.actor_count < 1) throw InvalidArgument("actor_count must be >= 1");
  if (params.duration < 2) throw InvalidArgument("duration must be >= 2");
  if (!(params.tempo_min > 0.0 && params.tempo_min <= params.tempo_max)) {
    throw InvalidArgument("tempo range must satisfy 0 < tempo_min <= tempo_max");
  }
  if (params.world_size <= params.actor_extent + 2 * params.wander_radius) {
    throw InvalidArgument("world too small for actor extent and wander radius");
  }
  SceneSpec scene;
  scene.width = params.width;
  scene.height = params.height;
  scene.duration = params.duration;
  scene.world_size = params.world_size;
  scene.actor_extent = params.actor_extent;
  scene.rng_seed = seed;
  Draws rng(seed, 0xac7);
  const double tempo = rng.uniform(params.tempo_min, params.tempo_max);
  for (int a = 0; a < params.actor_count; ++a) scene.actors.push_back(random_track(rng, params, tempo));
  return scene;
}

ViewSpec make_view(const SceneSpec& scene, double rotation_degrees, std::uint64_t seed, double noise_p,
                   double occluder_fraction) {
  if (!(occluder_fraction >= 0.0 && occluder_fraction <= 1.0)) {
    throw InvalidArgument("occluder_fraction must lie in [0, 1]");
  }
  Draws rng(seed, 0x71e);
  const double theta = rotation_degrees * std::numbers::pi / 180.0;
  // The rotated world square spans world_size * (|cos| + |sin|) <= world_size * sqrt(2).
  const double base = 0.9 * std::min(scene.width, scene.height) / (scene.world_size * std::numbers::sqrt2);
  const double sx = base * rng.uniform(0.8, 1.0);
  const double sy = base * rng.uniform(0.8, 1.0);
  const double cs = std::cos(theta), sn = std::sin(theta);

  ViewSpec v;
  v.world_to_image.a = sx * cs;
  v.world_to_image.b = -sx * sn;
  v.world_to_image.d = sy * sn;
  v.world_to_image.e = sy * cs;
  const double mid = scene.world_size / 2.0;
  v.world_to_image.c = scene.width / 2.0 - (v.world_to_image.a * mid + v.world_to_image.b * mid);
  v.world_to_image.f = scene.height / 2.0 - (v.world_to_image.d * mid + v.world_to_image.e * mid);
  v.noise_p = noise_p;
  v.rng_seed = seed;

  if (occluder_fraction > 0.0) {
    const double area = scene.width * scene.height * occluder_fraction * rng.uniform(0.5, 1.0);
    const double aspect = rng.uniform(0.5, 2.0);
    int w = std::clamp(static_cast<int>(std::sqrt(area * aspect)), 1, scene.width);
    int h = std::clamp(static_cast<int>(area / w), 1, scene.height);
    while (static_cast<double>(w) * h > scene.width * scene.height * occluder_fraction && h > 1) --h;
    PixelRect r{rng.uniform_int(0, scene.width - w), rng.uniform_int(0, scene.height - h), w, h};
    v.occluders.push_back(r);
  }
  return v;
}

void write_scene(std::ostream& out, const SceneSpec& scene, const std::vector<ViewSpec>& views) {
  char buf[256];
  out << "MBSCENE 1\n";
  out << "canvas " << scene.width << ' ' << scene.height << '\n';
  out << "duration " << scene.duration << '\n';
  std::snprintf(buf, sizeof(buf), "world %.17g\nextent %.17g\n", scene.world_size, scene.actor_extent);
  out << buf;
  out << "seed " << scene.rng_seed << '\n';
  for (const auto& actor : scene.actors) {
    out << "actor\n";
    for (const auto& k : actor.keys) {
      std::snprintf(buf, sizeof(buf), "key %d %.17g %.17g\n", k.frame, k.position.x, k.position.y);
      out << buf;
    }
  }
  for (const auto& v : views) {
    const auto& m = v.world_to_image;
    std::snprintf(buf, sizeof(buf), "view %.17g %.17g %.17g %.17g %.17g %.17g %.17g ", m.a, m.b, m.c, m.d, m.e,
                  m.f, v.noise_p);
    out << buf << v.rng_seed << '\n';
    for (const auto& r : v.occluders) out << "occluder " << r.x << ' ' << r.y << ' ' << r.w << ' ' << r.h << '\n';
  }
}

void read_scene(std::istream& in, const std::string& source, SceneSpec& scene, std::vector<ViewSpec>& views) {
  scene = SceneSpec{};
  scene.actors.clear();
  views.clear();
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream row(line);
    std::string tag;
    if (!(row >> tag)) continue;
    bool ok = true;
    if (!header) {
      int version = 0;
      ok = tag == "MBSCENE" && (row >> version) && version == 1;
      header = ok;
    } else if (tag == "canvas") {
      ok = static_cast<bool>(row >> scene.width >> scene.height);
    } else if (tag == "duration") {
      ok = static_cast<bool>(row >> scene.duration);
    } else if (tag == "world") {
      ok = static_cast<bool>(row >> scene.world_size);
    } else if (tag == "extent") {
      ok = static_cast<bool>(row >> scene.actor_extent);
    } else if (tag == "seed") {
      ok = static_cast<bool>(row >> scene.rng_seed);
    } else if (tag == "actor") {
      scene.actors.emplace_back();
    } else if (tag == "key") {
      Keyframe k;
      ok = !scene.actors.empty() && (row >> k.frame >> k.position.x >> k.position.y);
      if (ok) scene.actors.back().keys.push_back(k);
    } else if (tag == "view") {
      ViewSpec v;
      auto& m = v.world_to_image;
      ok = static_cast<bool>(row >> m.a >> m.b >> m.c >> m.d >> m.e >> m.f >> v.noise_p >> v.rng_seed);
      if (ok) views.push_back(v);
    } else if (tag == "occluder") {
      PixelRect r;
      ok = !views.empty() && (row >> r.x >> r.y >> r.w >> r.h);
      if (ok) views.back().occluders.push_back(r);
    } else {
      ok = false;
    }
    if (!ok) throw FormatError(source, lineno, "malformed scene line '" + line + "'");
  }
  if (!header) throw FormatError(source, 0, "missing MBSCENE header");
  try {
    scene.validate();
    for (const auto& v : views) v.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(source, 0, e.what());
  }
}

CorpusPlan plan_corpus(const CorpusParams& params) {
  if (params.scenes < 1) throw InvalidArgument("scenes must be >= 1");
  if (params.views_per_scene < 2) throw InvalidArgument("views_per_scene must be >= 2");
  if (params.views_per_scene > 8) throw InvalidArgument("views_per_scene must be <= 8 (views are >= 45 degrees apart)");
  if (params.distractors < 0) throw InvalidArgument("distractors must be >= 0");

  CorpusPlan plan;
  char id[64];
  const int views = params.views_per_scene;
  const double spacing = 360.0 / views;
  const double jitter = (spacing - 45.0) / 2.0;

  for (int s = 0; s < params.scenes; ++s) {
    const std::uint64_t scene_seed = derive_seed(params.seed, 1, static_cast<std::uint64_t>(s));
    plan.scenes.push_back(random_scene(scene_seed, params.scene));
    Draws rng(scene_seed, 0xa4e);
    const double base = rng.uniform(0.0, 360.0);
    std::vector<std::string> ids;
    for (int v = 0; v < views; ++v) {
      const double angle = base + v * spacing + rng.uniform(-jitter, jitter);
      const std::uint64_t view_seed = derive_seed(scene_seed, 2, static_cast<std::uint64_t>(v));
      std::snprintf(id, sizeof(id), "s%03d_v%d", s, v);
      plan.clips.push_back({id, plan.scenes.size() - 1,
                            make_view(plan.scenes.back(), angle, view_seed, params.noise_p,
                                      params.occluder_fraction)});
      ids.push_back(id);
    }
    for (const auto& q : ids) {
      RelevanceEntry e{q, {}};
      for (const auto& r : ids) {
        if (r != q) e.relevant_ids.push_back(r);
      }
      plan.relevance.push_back(std::move(e));
    }
  }
  for (int d = 0; d < params.distractors; ++d) {
    const std::uint64_t scene_seed = derive_seed(params.seed, 3, static_cast<std::uint64_t>(d));
    plan.scenes.push_back(random_scene(scene_seed, params.scene));
    Draws rng(scene_seed, 0xa4e);
    std::snprintf(id, sizeof(id), "d%03d", d);
    plan.clips.push_back({id, plan.scenes.size() - 1,
                          make_view(plan.scenes.back(), rng.uniform(0.0, 360.0), derive_seed(scene_seed, 2, 0),
                                    params.noise_p, params.occluder_fraction)});
  }
  return plan;
}

CorpusFiles generate_corpus(const std::filesystem::path& out_dir, const CorpusParams& params, bool emit_frames) {
  const CorpusPlan plan = plan_corpus(params);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "scenes", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "scenes").string() + ": " + ec.message());

  CorpusFiles files;
  std::size_t i = 0;
  while (i < plan.clips.size()) {
    // Clips of one scene are contiguous in the plan.
    std::size_t j = i;
    std::vector<ViewSpec> views;
    while (j < plan.clips.size() && plan.clips[j].scene == plan.clips[i].scene) views.push_back(plan.clips[j++].view);
    const auto scene_path = out_dir / "scenes" / (scene_name(plan.clips[i]) + ".scene");
    std::ofstream out(scene_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + scene_path.string());
    write_scene(out, plan.scenes[plan.clips[i].scene], views);
    if (!out.flush()) throw IoError("cannot write " + scene_path.string());

    for (std::size_t k = i; k < j; ++k) {
      const auto& clip = plan.clips[k];
      const auto& scene = plan.scenes[clip.scene];
      files.mask_manifests.push_back(
          write_mask_sequence(render_view(scene, clip.view, clip.clip_id), out_dir / clip.clip_id / "masks"));
      if (emit_frames) {
        files.frame_manifests.push_back(write_frame_sequence(render_view_frames(scene, clip.view, clip.clip_id),
                                                             out_dir / clip.clip_id / "frames"));
      }
    }
    i = j;
  }

  files.relevance = out_dir / "relevance.txt";
  std::ofstream rel(files.relevance, std::ios::binary);
  if (!rel) throw IoError("cannot write " + files.relevance.string());
  write_relevance(rel, plan.relevance);
  if (!rel.flush()) throw IoError("cannot write " + files.relevance.string());
  return files;
}

}  // namespace motion_barcode
