#pragma once

#include "fiberscan/image.hpp"

namespace fiberscan {

/// Flat square window with an odd side, centered on the pixel.
class StructuringElement {
 public:
  explicit StructuringElement(int side);
  int side() const noexcept { return side_; }
  int radius() const noexcept { return side_ / 2; }

 private:
  int side_;
};

// Flat grayscale morphology, replicate borders. Implemented with the
// van Herk / Gil-Werman running max, so cost does not depend on the side.
GrayImage dilate(const GrayImage& img, StructuringElement se);
GrayImage erode(const GrayImage& img, StructuringElement se);
GrayImage opening(const GrayImage& img, StructuringElement se);
GrayImage closing(const GrayImage& img, StructuringElement se);

/// Fills dark strokes narrower than the window (printed text), keeps thin
/// bright structures.
GrayImage suppress_text(const GrayImage& input, StructuringElement se_close);

/// Intermediate images of the background normalization step.
struct NormalizationTrace {
  GrayImage i0;     // text-suppressed input
  GrayImage ibg;    // background estimate (opening of i0)
  GrayImage idil;   // dilated background
  GrayImage ratio;  // i0 / (idil + eps)
};

NormalizationTrace normalize_background(const GrayImage& i0, StructuringElement se_open,
                                        StructuringElement se_dil, double eps);

/// Sets every sample inside `region` (clipped to the image) to 1.0.
GrayImage mask_photo_region(const GrayImage& img, const Rect& region);

}  // namespace fiberscan
