#ifndef SWARMCERT_MODEL_RNG_HPP
#define SWARMCERT_MODEL_RNG_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

namespace swarmcert::model {

// Deterministic xoshiro256++ stream with splitmix64 seeding. The library
// owns its generator (instead of <random> distributions) so that identical
// seeds give byte-identical benchmark output on any standard library.
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed) {
        uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    // Independent child stream; sampling from the parent does not disturb it.
    Rng substream(uint64_t id) const {
        uint64_t x = seed_ ^ (0x9e3779b97f4a7c15ull + id * 0xbf58476d1ce4e5b9ull);
        return Rng(splitmix64(x));
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<uint64_t>(n)); }

    // Marsaglia polar method (rejection count depends only on the stream).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    Eigen::Vector3d normal3() {
        return Eigen::Vector3d(normal(), normal(), normal());
    }

    Eigen::Vector3d unit_sphere() {
        Eigen::Vector3d v;
        double n2;
        do {
            v = normal3();
            n2 = v.squaredNorm();
        } while (n2 < 1e-24);
        return v / std::sqrt(n2);
    }

    // Uniformly distributed unit vector perpendicular to b (b must be unit).
    Eigen::Vector3d perpendicular_unit(const Eigen::Vector3d& b) {
        Eigen::Vector3d t = std::abs(b.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                  : Eigen::Vector3d::UnitY();
        const Eigen::Vector3d e1 = b.cross(t).normalized();
        const Eigen::Vector3d e2 = b.cross(e1);
        const double phi = uniform(0.0, 2.0 * M_PI);
        return std::cos(phi) * e1 + std::sin(phi) * e2;
    }

    // Uniform rotation via normalized quaternion of four Gaussians.
    Eigen::Matrix3d rotation_uniform() {
        Eigen::Quaterniond q(normal(), normal(), normal(), normal());
        while (q.norm() < 1e-12) q = Eigen::Quaterniond(normal(), normal(), normal(), normal());
        q.normalize();
        return q.toRotationMatrix();
    }

    uint64_t seed() const { return seed_; }

private:
    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ull;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t seed_;
    uint64_t state_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace swarmcert::model

#endif
