#pragma once

#include "sfsim/field.hpp"
#include "sfsim/params.hpp"

namespace sfsim {

// Everything the coupled dynamics needs from one application of the operator
//   B psi = -1/2 Laplacian psi + i u.grad psi + 1/2 |u|^2 psi + mu |psi|^2 psi.
// All products are formed pointwise on the grid; `bpsi` is truncated to the
// requested band and that truncated field is the one the exchange terms are
// built from, so the mass/energy bookkeeping downstream closes exactly.
struct CouplingBundle {
  SpectralField bpsi;    // B psi, truncated
  SpectralField source;  // 2 lambda Re(conj(psi) B psi), real, dealiased
  VelocityField force;   // -2 lambda [Im(grad conj(psi) B psi) + u Re(conj(psi) B psi)]
};

// bpsi_band < 0 means the grid dealias band.
CouplingBundle evaluate_coupling(const SpectralField& psi, const VelocityField& u,
                                 const ModelParams& p, int bpsi_band = -1);

// B psi truncated to `band` (default: grid dealias band).
SpectralField apply_B(const SpectralField& psi, const VelocityField& u,
                      const ModelParams& p, int band = -1);
// The linear part B_L = B - mu |psi|^2: same operator without the cubic term.
SpectralField apply_BL(const SpectralField& psi, const VelocityField& u,
                       const ModelParams& p, int band = -1);
// Mass exchange density 2 lambda Re(conj(psi) B psi) as a real field, with
// B psi truncated to bpsi_band (default: grid dealias band).
SpectralField coupling_source(const SpectralField& psi, const VelocityField& u,
                              const ModelParams& p, int bpsi_band = -1);
// Momentum exchange force (not Leray-projected; the projection happens in the
// velocity dynamics).
VelocityField momentum_source(const SpectralField& psi, const VelocityField& u,
                              const ModelParams& p, int bpsi_band = -1);

}  // namespace sfsim
