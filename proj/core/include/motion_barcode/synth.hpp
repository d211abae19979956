#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "motion_barcode/retrieval.hpp"
#include "motion_barcode/video_io.hpp"

namespace motion_barcode {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Actor path: positions at strictly increasing key frames, linearly
/// interpolated. A segment whose endpoints differ is a move interval, otherwise
/// a pause. The actor rests at the first/last key outside the keyed range.
struct Keyframe {
  int frame = 0;
  Point2 position;
};

struct ActorTrack {
  std::vector<Keyframe> keys;

  bool moving(int t) const;
  Point2 position(double t) const;
};

/// World-space scene. Actors are axis-aligned square boxes of side
/// actor_extent in world units.
struct SceneSpec {
  int width = 128;  // canvas, pixels
  int height = 96;
  int duration = 200;
  double world_size = 100.0;
  double actor_extent = 18.0;
  std::vector<ActorTrack> actors;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// x' = a*x + b*y + c, y' = d*x + e*y + f.
struct Affine2D {
  double a = 1.0, b = 0.0, c = 0.0;
  double d = 0.0, e = 1.0, f = 0.0;

  Point2 apply(Point2 p) const { return {a * p.x + b * p.y + c, d * p.x + e * p.y + f}; }
  double determinant() const { return a * e - b * d; }
  Affine2D inverse() const;  // throws InvalidArgument when singular
  /// Rotation of the linear part, degrees in (-180, 180].
  double rotation_degrees() const;
};

/// Pixel rectangle [x, x + w) x [y, y + h).
struct PixelRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool contains(int px, int py) const { return px >= x && py >= y && px < x + w && py < y + h; }
};

struct ViewSpec {
  Affine2D world_to_image;
  std::vector<PixelRect> occluders;  // motion forced to 0 inside
  double noise_p = 0.0;              // per-pixel, per-frame bit flip probability
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Rasterises moving actors' boxes (pixel centres inside the transformed box),
/// clears occluded pixels, then flips each bit with probability noise_p.
MotionMaskSequence render_view(const SceneSpec& scene, const ViewSpec& view, std::string clip_id = {});

/// Grayscale rendering of the same view for exercising the detectors: a static
/// textured background, every actor drawn as a bright box whether moving or
/// not, occluders drawn flat grey. noise_p is not applied.
FrameSequence render_view_frames(const SceneSpec& scene, const ViewSpec& view, std::string clip_id = {});

struct SceneGenParams {
  int width = 128;
  int height = 96;
  int duration = 200;
  int actor_count = 8;
  double world_size = 80.0;
  double actor_extent = 20.0;
  double wander_radius = 12.0;  // actors stay within this distance of a home point
  // Per-scene pace: move/pause segment lengths are scaled by a factor drawn
  // uniformly from [tempo_min, tempo_max].
  double tempo_min = 0.5;
  double tempo_max = 2.5;
};

/// Random scene: each actor alternates short move and pause segments around a
/// random home point.
SceneSpec random_scene(std::uint64_t seed, const SceneGenParams& params = {});

/// View rotating the world by `rotation_degrees` with a random anisotropic
/// scale, centred in the canvas so the whole world stays visible. With
/// occluder_fraction > 0 one random occluder covering at most that fraction
/// of the canvas is added.
ViewSpec make_view(const SceneSpec& scene, double rotation_degrees, std::uint64_t seed, double noise_p,
                   double occluder_fraction);

// Scene file, line oriented:
//   MBSCENE 1
//   canvas <w> <h>
//   duration <N>
//   world <size>
//   extent <actor_extent>
//   seed <u64>
//   actor                       (starts a new actor)
//   key <frame> <x> <y>         (keys of the current actor)
//   view <a> <b> <c> <d> <e> <f> <noise_p> <seed>
//   occluder <x> <y> <w> <h>    (belongs to the preceding view)
void write_scene(std::ostream& out, const SceneSpec& scene, const std::vector<ViewSpec>& views);
void read_scene(std::istream& in, const std::string& source, SceneSpec& scene, std::vector<ViewSpec>& views);

struct CorpusParams {
  int scenes = 20;
  int views_per_scene = 2;  // 2..8; view rotations are pairwise >= 45 degrees apart
  int distractors = 20;
  std::uint64_t seed = 1;
  double noise_p = 0.0;
  double occluder_fraction = 0.0;
  SceneGenParams scene;
};

struct PlannedClip {
  std::string clip_id;
  std::size_t scene = 0;  // into CorpusPlan::scenes
  ViewSpec view;
};

/// Clip ids are s<scene>_v<view> for event views and d<index> for distractors.
struct CorpusPlan {
  std::vector<SceneSpec> scenes;
  std::vector<PlannedClip> clips;
  RelevanceList relevance;  // one line per event view, listing the scene's other views
};

CorpusPlan plan_corpus(const CorpusParams& params);

struct CorpusFiles {
  std::vector<std::filesystem::path> mask_manifests;
  std::vector<std::filesystem::path> frame_manifests;  // empty unless frames were emitted
  std::filesystem::path relevance;
};

/// Writes <out>/<clip_id>/masks/<clip_id>.txt (+ frames/ when emit_frames),
/// <out>/scenes/<scene>.scene and <out>/relevance.txt.
CorpusFiles generate_corpus(const std::filesystem::path& out_dir, const CorpusParams& params,
                            bool emit_frames = false);

}  // namespace motion_barcode
