#ifndef OCCMAP_LAYERS_H
#define OCCMAP_LAYERS_H

#include "VoxelMean.h"

#include <array>
#include <cstdint>
#include <string_view>
#include <type_traits>

namespace occmap
{
/// Per-voxel data channels. The numeric values are the layer ids written to map files.
enum class Layer : std::uint8_t
{
  kOccupancy = 0,
  kMean = 1,
  kCovariance = 2,
  kDecay = 3,
  kTsdf = 4,
  kTraversal = 5,
};

constexpr std::array<Layer, 6> kAllLayers = { Layer::kOccupancy, Layer::kMean,  Layer::kCovariance,
                                              Layer::kDecay,     Layer::kTsdf,  Layer::kTraversal };

std::string_view layerName(Layer layer);

/// Small bit set of enabled layers.
class LayerSet
{
public:
  constexpr LayerSet() = default;
  constexpr LayerSet(std::initializer_list<Layer> layers)
  {
    for (Layer l : layers)
    {
      bits_ |= bit(l);
    }
  }

  constexpr bool has(Layer l) const { return (bits_ & bit(l)) != 0; }
  constexpr bool containsAll(LayerSet other) const { return (bits_ & other.bits_) == other.bits_; }
  constexpr LayerSet &add(Layer l)
  {
    bits_ |= bit(l);
    return *this;
  }
  constexpr std::uint32_t bits() const { return bits_; }

  friend constexpr bool operator==(LayerSet, LayerSet) = default;

private:
  static constexpr std::uint32_t bit(Layer l) { return 1u << static_cast<unsigned>(l); }
  std::uint32_t bits_ = 0;
};

/// Lower-triangular square root S of the sample covariance (Sigma = S S^T), row-major
/// (s11, s21, s22, s31, s32, s33), plus the full precision mean in metres. Only written by the
/// single owner of a voxel during the hit phase.
struct NdtCovariance
{
  std::array<double, 6> sqrt{};
  std::array<double, 3> mean{};
};

/// Decay-rate accumulators: return count H and total ray length through the voxel in metres. Each field is
/// updated by its own CAS.
struct DecayVoxel
{
  std::uint32_t hits = 0;
  /// Explicit padding keeps every byte defined; layers are compared and saved as raw bytes.
  std::uint32_t reserved = 0;
  double distance_sum = 0.0;
};

/// Distance and weight share one 64-bit word so the pair is replaced by a single CAS.
struct alignas(8) TsdfVoxel
{
  float distance = 0.0f;
  float weight = 0.0f;
};

/// NDT-TM extras: permeability counts and single-pass intensity moments.
struct TraversalVoxel
{
  std::uint32_t hits = 0;
  std::uint32_t misses = 0;
  std::uint32_t intensity_count = 0;
  std::uint32_t reserved = 0;
  double intensity_mean = 0.0;
  double intensity_m2 = 0.0;
};

static_assert(std::is_trivially_copyable_v<NdtCovariance>);
static_assert(std::is_trivially_copyable_v<DecayVoxel>);
static_assert(std::is_trivially_copyable_v<TsdfVoxel>);
static_assert(std::is_trivially_copyable_v<TraversalVoxel>);
static_assert(sizeof(VoxelMean) == 8 && sizeof(TsdfVoxel) == 8 && sizeof(DecayVoxel) == 16);
static_assert(sizeof(TraversalVoxel) == 32 && sizeof(NdtCovariance) == 72);
}  // namespace occmap

#endif  // OCCMAP_LAYERS_H
