#pragma once

// Lane-generic double-precision log / sincos / Box-Muller. The same template
// is instantiated for the scalar lane and the AVX2 lane, with a fixed
// operation order and no FMA contraction (see kernels CMake flags), so both
// backends produce bit-identical output. Polynomial coefficients are the
// classic fdlibm kernels; accuracy is ~1-2 ulp on the reduced ranges, far
// beyond what any statistic downstream can resolve.

namespace bmlab::kernels {

template <class L>
struct LaneMath {
  using D = typename L::D;
  using I = typename L::I;
  using M = typename L::M;

  // Natural log for positive, finite, normal inputs (all u01 outputs qualify).
  static D log(D x) {
    const D kSqrt2 = L::splat(1.41421356237309514547462185873882845);
    const D kLn2Hi = L::splat(6.93147180369123816490e-01);
    const D kLn2Lo = L::splat(1.90821492927058770002e-10);
    const D kLg1 = L::splat(6.666666666666735130e-01);
    const D kLg2 = L::splat(3.999999999940941908e-01);
    const D kLg3 = L::splat(2.857142874366239149e-01);
    const D kLg4 = L::splat(2.222219843214978396e-01);
    const D kLg5 = L::splat(1.818357216161805012e-01);
    const D kLg6 = L::splat(1.531383769920937332e-01);
    const D kLg7 = L::splat(1.479819860511658591e-01);

    const I bits = L::to_bits(x);
    const I expfield = L::shr_u(bits, 52);
    D e = L::sub(L::small_uint_to_double(expfield), L::splat(1023.0));
    const I mant = L::or_(L::and_(bits, L::splat_i(0x000FFFFFFFFFFFFFll)),
                          L::splat_i(0x3FF0000000000000ll));
    D m = L::from_bits(mant);
    const M big = L::ge(m, kSqrt2);
    m = L::select(big, L::mul(m, L::splat(0.5)), m);
    e = L::select(big, L::add(e, L::splat(1.0)), e);

    const D f = L::sub(m, L::splat(1.0));
    const D s = L::div(f, L::add(L::splat(2.0), f));
    const D z = L::mul(s, s);
    const D w = L::mul(z, z);
    const D t1 = L::mul(w, L::add(kLg2, L::mul(w, L::add(kLg4, L::mul(w, kLg6)))));
    const D t2 = L::mul(
        z, L::add(kLg1, L::mul(w, L::add(kLg3, L::mul(w, L::add(kLg5, L::mul(w, kLg7)))))));
    const D r = L::add(t2, t1);
    const D hfsq = L::mul(L::splat(0.5), L::mul(f, f));
    // e*ln2_hi - ((hfsq - (s*(hfsq+r) + e*ln2_lo)) - f)
    const D inner = L::add(L::mul(s, L::add(hfsq, r)), L::mul(e, kLn2Lo));
    return L::sub(L::mul(e, kLn2Hi), L::sub(L::sub(hfsq, inner), f));
  }

  // sin and cos of 2*pi*u for u in (0,1).
  static void sincospi2(D u, D* sin_out, D* cos_out) {
    const D kPio2 = L::splat(1.57079632679489661923);
    const D kS1 = L::splat(-1.66666666666666324348e-01);
    const D kS2 = L::splat(8.33333333332248946124e-03);
    const D kS3 = L::splat(-1.98412698298579493134e-04);
    const D kS4 = L::splat(2.75573137070700676789e-06);
    const D kS5 = L::splat(-2.50507602534068634195e-08);
    const D kS6 = L::splat(1.58969099521155010221e-10);
    const D kC1 = L::splat(4.16666666666666019037e-02);
    const D kC2 = L::splat(-1.38888888888741095749e-03);
    const D kC3 = L::splat(2.48015872894767294178e-05);
    const D kC4 = L::splat(-2.75573143513906633035e-07);
    const D kC5 = L::splat(2.08757232129817482790e-09);
    const D kC6 = L::splat(-1.13596475577881948265e-11);

    const D w = L::mul(L::splat(4.0), u);
    const D kd = L::nearbyint(w);
    const D r = L::sub(w, kd);
    const D x = L::mul(r, kPio2);  // |x| <= pi/4
    const D z = L::mul(x, x);

    D ps = kS6;
    ps = L::add(L::mul(ps, z), kS5);
    ps = L::add(L::mul(ps, z), kS4);
    ps = L::add(L::mul(ps, z), kS3);
    ps = L::add(L::mul(ps, z), kS2);
    const D sinx = L::add(x, L::mul(L::mul(x, z), L::add(kS1, L::mul(z, ps))));

    D pc = kC6;
    pc = L::add(L::mul(pc, z), kC5);
    pc = L::add(L::mul(pc, z), kC4);
    pc = L::add(L::mul(pc, z), kC3);
    pc = L::add(L::mul(pc, z), kC2);
    pc = L::add(L::mul(pc, z), kC1);
    const D cosx =
        L::add(L::sub(L::splat(1.0), L::mul(L::splat(0.5), z)), L::mul(L::mul(z, z), pc));

    const I q = L::and_(L::small_toint(kd), L::splat_i(3));
    const M swap = L::int_bit0_set(q);
    const D s0 = L::select(swap, cosx, sinx);
    const D c0 = L::select(swap, sinx, cosx);
    const I sin_sign = L::shl(L::and_(L::shr_u(q, 1), L::splat_i(1)), 63);
    const I cos_sign =
        L::shl(L::and_(L::shr_u(L::add_i(q, L::splat_i(1)), 1), L::splat_i(1)), 63);
    *sin_out = L::from_bits(L::xor_(L::to_bits(s0), sin_sign));
    *cos_out = L::from_bits(L::xor_(L::to_bits(c0), cos_sign));
  }

  static void box_muller(D u1, D u2, D* z0, D* z1) {
    const D radius = L::sqrt(L::mul(L::splat(-2.0), log(u1)));
    D s, c;
    sincospi2(u2, &s, &c);
    *z0 = L::mul(radius, c);
    *z1 = L::mul(radius, s);
  }
};

}  // namespace bmlab::kernels
