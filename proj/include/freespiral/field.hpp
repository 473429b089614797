#pragma once

#include <string>
#include <variant>

#include "freespiral/vec3.hpp"

namespace freespiral {

struct ZeroField {
    friend bool operator==(const ZeroField&, const ZeroField&) = default;
};

struct UniformField {
    Vec3 E0;
    friend bool operator==(const UniformField&, const UniformField&) = default;
};

// E_z = gradient * z along z.
struct LinearZField {
    double gradient = 0.0;
    friend bool operator==(const LinearZField&, const LinearZField&) = default;
};

// E_z = amplitude * cos(2 pi z / wavelength) along z.
struct PeriodicZField {
    double amplitude = 0.0;
    double wavelength = 1.0;
    friend bool operator==(const PeriodicZField&, const PeriodicZField&) = default;
};

/// Static external electric field.
class FieldSpec {
public:
    using Variant = std::variant<ZeroField, UniformField, LinearZField, PeriodicZField>;

    FieldSpec() = default;
    FieldSpec(Variant v);  // NOLINT: implicit by design of the variant wrapper

    static FieldSpec zero() { return FieldSpec{}; }
    static FieldSpec uniform(const Vec3& E0) { return FieldSpec{UniformField{E0}}; }
    static FieldSpec linear_z(double gradient) { return FieldSpec{LinearZField{gradient}}; }
    static FieldSpec periodic_z(double amplitude, double wavelength) {
        return FieldSpec{PeriodicZField{amplitude, wavelength}};
    }

    Vec3 at(const Vec3& r) const;
    /// Scalar potential with E = -grad phi.
    double potential(const Vec3& r) const;

    bool is_zero() const;
    const Variant& variant() const { return field_; }
    std::string tag() const;

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

private:
    Variant field_;
};

}  // namespace freespiral
