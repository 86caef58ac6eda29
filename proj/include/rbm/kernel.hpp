#pragma once

#include <atomic>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rbm/biorth.hpp"
#include "rbm/initial_data.hpp"

namespace rbm {

/// Extended kernel on {indices} x R, evaluated in blocks for Nystrom assembly.
/// Row/column labels i, j index into the index list of the kernel.
class BlockKernel {
public:
    virtual ~BlockKernel() = default;
    virtual int lines() const = 0;
    virtual Eigen::MatrixXd block(int i, std::span<const double> xs, int j, std::span<const double> ys) const = 0;
    double operator()(int i, double zi, int j, double zj) const {
        const double x[1] = {zi}, y[1] = {zj};
        return block(i, x, j, y)(0, 0);
    }
};

enum class KernelKind { S, Sbar };

/// S_{-t,-n}(z1,z2) = e^{z1-z2} psi_n(t,z1-z2);  Sbar_{-t,n}(z1,z2) = e^{z2-z1} psibar_{n-1}(t,z1-z2).
double s_ops(KernelKind kind, double t, int n, double z1, double z2);

/// E_{B_0=z1}[ Sbar_{-t,n-tau}(B_tau, z2) 1{tau<n} ].
double sbar_epi(const InitialCondition& ic, double t, int n, double z1, double z2);

enum class Representation { hitting, biorth, operator_step };

struct KernelOptions {
    int eta_order = 16;     // Gauss–Legendre nodes per eta panel (hitting representation)
    double eta_reach = 10.0;  // eta window beyond the Hermite bulk, in units of sqrt(t)
    int tail_order = 24;    // half-line integrals of the operator-step representation
    unsigned threads = 0;
};

struct KernelSpec {
    double t = 1.0;
    std::vector<int> indices;
    InitialCondition ic;
    Representation representation = Representation::hitting;
    bool conjugated = true;
    KernelOptions options;
};

void validate(const KernelSpec& spec);

/// K_t(n_i,z_i; n_j,z_j) (or e^{z_j-z_i} K_t when conjugated):
///   -d^{-(n_j-n_i)}(z_i,z_j) 1{n_i<n_j} + second term from the chosen representation.
class ExtendedKernel : public BlockKernel {
public:
    explicit ExtendedKernel(KernelSpec spec);

    const KernelSpec& spec() const { return spec_; }
    int lines() const override { return static_cast<int>(spec_.indices.size()); }
    Eigen::MatrixXd block(int i, std::span<const double> xs, int j, std::span<const double> ys) const override;

    std::uint64_t block_calls() const { return block_calls_.load(); }
    std::uint64_t entries() const { return entries_.load(); }

private:
    Eigen::MatrixXd second_hitting(int ni, std::span<const double> xs, int nj, std::span<const double> ys) const;
    Eigen::MatrixXd second_biorth(int ni, std::span<const double> xs, int nj, std::span<const double> ys) const;
    Eigen::MatrixXd second_operator(int ni, std::span<const double> xs, int nj, std::span<const double> ys) const;

    KernelSpec spec_;
    StepProfile profile_;
    std::vector<std::vector<Polynomial>> phi_;  // biorth: phi_[j][k] = Phi^{n_j}_k
    mutable std::atomic<std::uint64_t> block_calls_{0};
    mutable std::atomic<std::uint64_t> entries_{0};
};

std::shared_ptr<ExtendedKernel> kernel_eval(const KernelSpec& spec);

}  // namespace rbm
