#pragma once

namespace rbm {

enum class ContourKind { S, Sbar };

struct ContourOptions {
    double tolerance = 1e-12;
    /// Circle radius for Sbar; <= 0 selects the saddle-point radius.
    double radius = 0.0;
    int max_refinements = 30;
};

struct ContourResult {
    double value;
    double error_estimate;
};

/// Contour-integral evaluation of the building-block kernels, used to
/// cross-check the Hermite forms:
///   S_{-t,-n}(z1,z2)  = 1/(2 pi i) int_{i R + delta} w^n e^{t w^2/2 + (1-w)(z1-z2)} dw
///   Sbar_{-t,n}(z1,z2) = 1/(2 pi i) oint_{|w|=r} w^{-n} e^{-t w^2/2 + (w-1)(z1-z2)} dw
/// The vertical line is placed through the saddle point and integrated with the
/// trapezoid rule; the truncation half-width is doubled until the tail is below
/// 1e-12 of the bulk. The circle uses an M-point trapezoid rule with M doubled
/// until stable. Throws ConvergenceError with the achieved error otherwise.
ContourResult contour_eval(ContourKind kind, double t, int n, double z1, double z2,
                           const ContourOptions& options = {});

}  // namespace rbm
