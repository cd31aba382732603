#include "ats/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace ats::quad {

namespace {

// Gauss-Kronrod nodes/weights on (-1,1), positive half only (symmetric).
// Values as evaluated with 80 decimal digit arithmetic by L. W. Fullerton,
// Bell Labs, 1981 (the classic QUADPACK dqk15/dqk21/dqk61 tables).

const double xgk15[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double wgk15[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double wg15[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

const double xgk21[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
const double wgk21[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
const double wg21[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

const double xgk61[31] = {
    0.999484410050490637571325895705811, 0.996893484074649540271630050918695,
    0.991630996870404594858628366109486, 0.983668123279747209970032581605663,
    0.973116322501126268374693868423707, 0.960021864968307512216871025581798,
    0.944374444748559979415831324037439, 0.926200047429274325879324277080474,
    0.905573307699907798546522558925958, 0.882560535792052681543116462530226,
    0.857205233546061098958658510658944, 0.829565762382768397442898119732502,
    0.799727835821839083013668942322683, 0.767777432104826194917977340974503,
    0.733790062453226804726171131369528, 0.697850494793315796932292388026640,
    0.660061064126626961370053668149271, 0.620526182989242861140477556431189,
    0.579345235826361691756024932172540, 0.536624148142019899264169793311073,
    0.492480467861778574993693061207709, 0.447033769538089176780609900322854,
    0.400401254830394392535476211542661, 0.352704725530878113471037207089374,
    0.304073202273625077372677107199257, 0.254636926167889846439805129817805,
    0.204525116682309891438957671002025, 0.153869913608583546963794672743256,
    0.102806937966737030147096751318001, 0.051471842555317695833025213166723,
    0.000000000000000000000000000000000};
const double wgk61[31] = {
    0.001389013698677007624551591226760, 0.003890461127099884051267201844516,
    0.006630703915931292173319826369750, 0.009273279659517763428441146892024,
    0.011823015253496341742232898853251, 0.014369729507045804812451432443580,
    0.016920889189053272627572289420322, 0.019414141193942381173408951050128,
    0.021828035821609192297167485738339, 0.024191162078080601365686370725232,
    0.026509954882333101610601709335075, 0.028754048765041292843978785354334,
    0.030907257562387762472884252943092, 0.032981447057483726031814191016854,
    0.034979338028060024137499670731468, 0.036882364651821229223911065617136,
    0.038678945624727592950348651532281, 0.040374538951535959111995279752468,
    0.041969810215164246147147541285970, 0.043452539701356069316831728117073,
    0.044814800133162663192355551616723, 0.046059238271006988116271735559374,
    0.047185546569299153945261478181099, 0.048185861757087129140779492298305,
    0.049055434555029778887528165367238, 0.049795683427074206357811569379942,
    0.050405921402782346840893085653585, 0.050881795898749606492297473049805,
    0.051221547849258772170656282604944, 0.051426128537459025933862879215781,
    0.051494729429451567558340433647099};
const double wg61[15] = {
    0.007968192496166605615465883474674, 0.018466468311090959142302131912047,
    0.028784707883323369349719179611292, 0.038799192569627049596801936446348,
    0.048402672830594052902938140422808, 0.057493156217619066481721689402056,
    0.065974229882180495128128515115962, 0.073755974737705206268243850022191,
    0.080755895229420215354694938460530, 0.086899787201082979802387530715126,
    0.092122522237786128717632707087619, 0.096368737174644259639468626351810,
    0.099593420586795267062780282103569, 0.101762389748405504596428952168554,
    0.102852652893558840341285636705415};

struct GkTable {
    const double* xgk;
    const double* wgk;
    const double* wg;
    int nk;  // entries in xgk/wgk (positive half incl. centre)
};

GkTable table_for(QuadConfig::Rule r) {
    switch (r) {
        case QuadConfig::Rule::GK15: return {xgk15, wgk15, wg15, 8};
        case QuadConfig::Rule::GK21: return {xgk21, wgk21, wg21, 11};
        case QuadConfig::Rule::GK61: return {xgk61, wgk61, wg61, 31};
    }
    throw std::logic_error("unknown quadrature rule");
}

struct Interval {
    double lo, hi, value, error, resabs;
};

struct WorstFirst {
    bool operator()(const Interval& p, const Interval& q) const {
        if (p.error != q.error) return p.error < q.error;
        return p.lo > q.lo;  // deterministic tie-break
    }
};

double eval_checked(const Integrand& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v))
        throw std::runtime_error("quadrature: integrand returned non-finite value at x = " +
                                 std::to_string(x));
    return v;
}

// Single Gauss-Kronrod pass over [lo, hi] with the QUADPACK error estimate.
Interval gk_apply(const Integrand& f, double lo, double hi, const GkTable& tb) {
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();

    const double centr = 0.5 * (lo + hi);
    const double hlgth = 0.5 * (hi - lo);
    const int nk = tb.nk;
    const bool centre_in_gauss = (nk % 2 == 0);

    double fv1[30], fv2[30];
    const double fc = eval_checked(f, centr);
    double resk = tb.wgk[nk - 1] * fc;
    double resg = centre_in_gauss ? tb.wg[nk / 2 - 1] * fc : 0.0;
    double resabs = std::fabs(resk);
    for (int i = 0; i < nk - 1; ++i) {
        const double absc = hlgth * tb.xgk[i];
        const double f1 = eval_checked(f, centr - absc);
        const double f2 = eval_checked(f, centr + absc);
        fv1[i] = f1;
        fv2[i] = f2;
        const double fsum = f1 + f2;
        resk += tb.wgk[i] * fsum;
        if (i % 2 == 1) resg += tb.wg[i / 2] * fsum;
        resabs += tb.wgk[i] * (std::fabs(f1) + std::fabs(f2));
    }
    const double reskh = 0.5 * resk;
    double resasc = tb.wgk[nk - 1] * std::fabs(fc - reskh);
    for (int i = 0; i < nk - 1; ++i)
        resasc += tb.wgk[i] * (std::fabs(fv1[i] - reskh) + std::fabs(fv2[i] - reskh));

    const double dhlgth = std::fabs(hlgth);
    resabs *= dhlgth;
    resasc *= dhlgth;
    double err = std::fabs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > uflow / (50.0 * epmach)) err = std::max(epmach * 50.0 * resabs, err);
    return {lo, hi, resk * hlgth, err, resabs};
}

}  // namespace

QuadResult integrate_finite(const Integrand& f, double lo, double hi, const QuadConfig& cfg) {
    if (!(std::isfinite(lo) && std::isfinite(hi)))
        throw std::invalid_argument("integrate_finite: non-finite limits");
    if (lo == hi) return {0.0, 0.0, 0.0, 0, true};
    if (lo > hi) throw std::invalid_argument("integrate_finite: lo > hi");

    const GkTable tb = table_for(cfg.rule);
    std::priority_queue<Interval, std::vector<Interval>, WorstFirst> heap;
    heap.push(gk_apply(f, lo, hi, tb));
    double total_value = heap.top().value;
    double total_error = heap.top().error;
    double total_resabs = heap.top().resabs;

    int splits = 0;
    auto good_enough = [&] {
        return total_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total_value));
    };
    while (!good_enough() && splits < cfg.max_subdivisions) {
        const Interval worst = heap.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) break;  // interval at roundoff limit
        heap.pop();
        const Interval left = gk_apply(f, worst.lo, mid, tb);
        const Interval right = gk_apply(f, mid, worst.hi, tb);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        total_resabs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
        ++splits;
    }

    // Re-sum from the interval list to shed accumulated cancellation in the
    // incremental updates.
    if (splits > 0) {
        total_value = 0.0;
        total_error = 0.0;
        total_resabs = 0.0;
        while (!heap.empty()) {
            total_value += heap.top().value;
            total_error += heap.top().error;
            total_resabs += heap.top().resabs;
            heap.pop();
        }
    }

    QuadResult r;
    r.value = total_value;
    r.error_estimate = total_error;
    r.abs_integral = total_resabs;
    r.subdivisions_used = splits;
    r.converged = total_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total_value));
    return r;
}

QuadResult integrate_semi_infinite(const Integrand& f, double lo, const QuadConfig& cfg) {
    if (!std::isfinite(lo)) throw std::invalid_argument("integrate_semi_infinite: bad lower limit");
    auto mapped = [&f, lo](double s) {
        const double om = 1.0 - s;
        return f(lo + s / om) / (om * om);
    };
    return integrate_finite(mapped, 0.0, 1.0, cfg);
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("find_root: need lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("find_root: need tol > 0");
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("find_root: f(lo) and f(hi) have the same sign");

    // Brent's method: inverse quadratic / secant with bisection safeguard.
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {  // secant
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {  // inverse quadratic
                const double qq = fa / fc, rr = fb / fc;
                p = s * (2.0 * xm * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

}  // namespace ats::quad
