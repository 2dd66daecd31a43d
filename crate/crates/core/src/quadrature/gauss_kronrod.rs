use num_complex::Complex64;

// 21-point Kronrod extension of the 10-point Gauss rule (abscissae descending, centre last).
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525359421,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Clone, Copy, Debug)]
pub(crate) struct Segment {
    pub a: f64,
    pub b: f64,
    pub value: Complex64,
    pub err: f64,
}

/// One GK21 panel with the usual heuristic error rescaling, applied per component.
pub(crate) fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Segment {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let dhlgth = hlgth.abs();

    let fc = f(centr);
    let mut resk = fc * WGK[10];
    let mut resg = Complex64::new(0.0, 0.0);
    let mut resabs = [fc.re.abs() * WGK[10], fc.im.abs() * WGK[10]];
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];
    for j in 0..10 {
        let dx = hlgth * XGK[j];
        let f1 = f(centr - dx);
        let f2 = f(centr + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += (f1 + f2) * WGK[j];
        resabs[0] += WGK[j] * (f1.re.abs() + f2.re.abs());
        resabs[1] += WGK[j] * (f1.im.abs() + f2.im.abs());
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = [WGK[10] * (fc.re - reskh.re).abs(), WGK[10] * (fc.im - reskh.im).abs()];
    for j in 0..10 {
        resasc[0] += WGK[j] * ((fv1[j].re - reskh.re).abs() + (fv2[j].re - reskh.re).abs());
        resasc[1] += WGK[j] * ((fv1[j].im - reskh.im).abs() + (fv2[j].im - reskh.im).abs());
    }
    let value = resk * hlgth;
    let diff = (resk - resg) * hlgth;
    let comp = |raw: f64, asc: f64, abs: f64| -> f64 {
        let mut e = raw.abs();
        let asc = asc * dhlgth;
        let abs = abs * dhlgth;
        if asc != 0.0 && e != 0.0 {
            e = asc * (1.0f64).min((200.0 * e / asc).powf(1.5));
        }
        if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            e = e.max(50.0 * f64::EPSILON * abs);
        }
        e
    };
    let err = comp(diff.re, resasc[0], resabs[0]).hypot(comp(diff.im, resasc[1], resabs[1]));
    Segment { a, b, value, err }
}
