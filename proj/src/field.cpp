#include "freespiral/field.hpp"

#include <cmath>
#include <numbers>

#include "freespiral/errors.hpp"

namespace freespiral {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

FieldSpec::FieldSpec(Variant v) : field_(std::move(v)) {
    std::visit(overloaded{
                   [](const ZeroField&) {},
                   [](const UniformField& f) {
                       if (!is_finite(f.E0)) throw PreconditionError("uniform field must be finite");
                   },
                   [](const LinearZField& f) {
                       if (!std::isfinite(f.gradient))
                           throw PreconditionError("field gradient must be finite");
                   },
                   [](const PeriodicZField& f) {
                       if (!std::isfinite(f.amplitude))
                           throw PreconditionError("periodic field amplitude must be finite");
                       if (!(f.wavelength > 0.0) || !std::isfinite(f.wavelength))
                           throw PreconditionError("periodic field wavelength must be positive");
                   },
               },
               field_);
}

Vec3 FieldSpec::at(const Vec3& r) const {
    return std::visit(overloaded{
                          [](const ZeroField&) { return Vec3{}; },
                          [](const UniformField& f) { return f.E0; },
                          [&](const LinearZField& f) { return Vec3{0.0, 0.0, f.gradient * r.z}; },
                          [&](const PeriodicZField& f) {
                              const double k = 2.0 * std::numbers::pi / f.wavelength;
                              return Vec3{0.0, 0.0, f.amplitude * std::cos(k * r.z)};
                          },
                      },
                      field_);
}

double FieldSpec::potential(const Vec3& r) const {
    return std::visit(overloaded{
                          [](const ZeroField&) { return 0.0; },
                          [&](const UniformField& f) { return -dot(f.E0, r); },
                          [&](const LinearZField& f) { return -0.5 * f.gradient * r.z * r.z; },
                          [&](const PeriodicZField& f) {
                              const double k = 2.0 * std::numbers::pi / f.wavelength;
                              return -f.amplitude * std::sin(k * r.z) / k;
                          },
                      },
                      field_);
}

bool FieldSpec::is_zero() const {
    return std::visit(overloaded{
                          [](const ZeroField&) { return true; },
                          [](const UniformField& f) { return f.E0 == Vec3{}; },
                          [](const LinearZField& f) { return f.gradient == 0.0; },
                          [](const PeriodicZField& f) { return f.amplitude == 0.0; },
                      },
                      field_);
}

std::string FieldSpec::tag() const {
    return std::visit(overloaded{
                          [](const ZeroField&) { return std::string("zero"); },
                          [](const UniformField&) { return std::string("uniform"); },
                          [](const LinearZField&) { return std::string("linear_z"); },
                          [](const PeriodicZField&) { return std::string("periodic_z"); },
                      },
                      field_);
}

}  // namespace freespiral
