#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>

namespace icosoku {

inline constexpr int kVertexCount = 12;
inline constexpr int kFaceCount = 20;
inline constexpr int kEdgeCount = 30;
inline constexpr int kFacesPerVertex = 5;

using FaceTriple = std::array<int, 3>;

struct Incidence {
  int face;
  int corner;
};

using VertexPermutation = std::array<int, kVertexCount>;

// Labeled regular icosahedron.
//
// v0 is the top apex, v1..v5 the upper ring, v6..v10 the lower ring with
// v(i+5) sitting below the edge v(i)-v(i+1), and v11 the bottom apex. Faces
// come in four bands of five (top cap, downward band, upward band, bottom
// cap) and every triple is wound counter-clockwise seen from outside, so a
// corner triple read along a face matches the cyclic order of a tile lying
// on it.
class Topology {
 public:
  constexpr Topology() {
    const auto upper = [](int i) { return 1 + ((i % 5) + 5) % 5; };
    const auto lower = [](int i) { return 6 + ((i % 5) + 5) % 5; };
    for (int i = 0; i < 5; ++i) {
      faces_[i] = {0, upper(i), upper(i + 1)};
      faces_[5 + i] = {upper(i), lower(i), upper(i + 1)};
      faces_[10 + i] = {lower(i - 1), lower(i), upper(i)};
      faces_[15 + i] = {lower(i + 1), lower(i), 11};
    }
    std::array<int, kVertexCount> fill{};
    for (int f = 0; f < kFaceCount; ++f) {
      for (int c = 0; c < 3; ++c) {
        const int v = faces_[f][c];
        incident_[v][fill[v]++] = Incidence{f, c};
      }
    }
  }

  constexpr int vertex_count() const { return kVertexCount; }
  constexpr const std::array<FaceTriple, kFaceCount>& faces() const { return faces_; }
  constexpr const FaceTriple& face(int f) const { return faces_.at(f); }

  // The five (face, corner) pairs whose corner sits on v, in face order.
  constexpr const std::array<Incidence, kFacesPerVertex>& faces_at_vertex(int v) const {
    if (v < 0 || v >= kVertexCount) {
      throw std::out_of_range("vertex index out of range");
    }
    return incident_[v];
  }

  // Face index whose vertex set equals the given triple up to cyclic order,
  // together with the cyclic shift s such that face[(c + s) % 3] == tri[c].
  // Returns {-1, -1} when no face matches.
  constexpr std::array<int, 2> find_face(const FaceTriple& tri) const {
    for (int f = 0; f < kFaceCount; ++f) {
      for (int s = 0; s < 3; ++s) {
        if (faces_[f][s] == tri[0] && faces_[f][(s + 1) % 3] == tri[1] &&
            faces_[f][(s + 2) % 3] == tri[2]) {
          return {f, s};
        }
      }
    }
    return {-1, -1};
  }

 private:
  std::array<FaceTriple, kFaceCount> faces_{};
  std::array<std::array<Incidence, kFacesPerVertex>, kVertexCount> incident_{};
};

inline constexpr Topology build_icosahedron() { return Topology{}; }

// Rotation by k fifths of a turn about the v0 axis: v0 and v11 are fixed,
// both rings shift by k positions. image[v] is where vertex v goes.
inline constexpr VertexPermutation rotation_about_apex(const Topology&, int k) {
  if (k < 0 || k >= 5) {
    throw std::out_of_range("apex rotation step must be in 0..4");
  }
  VertexPermutation image{};
  image[0] = 0;
  image[11] = 11;
  for (int i = 0; i < 5; ++i) {
    image[1 + i] = 1 + (i + k) % 5;
    image[6 + i] = 6 + (i + k) % 5;
  }
  return image;
}

inline constexpr VertexPermutation compose(const VertexPermutation& outer,
                                           const VertexPermutation& inner) {
  VertexPermutation out{};
  for (int v = 0; v < kVertexCount; ++v) out[v] = outer[inner[v]];
  return out;
}

}  // namespace icosoku
