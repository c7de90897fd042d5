/// Dot products are clamped to `[-MAX_LOGIT, MAX_LOGIT]` before the sigmoid.
pub const MAX_LOGIT: f64 = 30.0;

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `-log(sigmoid(x))`, computed without overflow.
#[inline]
pub fn neg_log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

/// Loss of one (center, context) pair with its negatives, and the gradient of
/// that loss with respect to every vector involved.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub loss: f64,
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `loss = -log s(u.v) - sum_n log s(-u.n)` with `s` the logistic sigmoid.
///
/// A clamped dot product contributes a constant to the loss and nothing to
/// the gradient.
pub fn sgns_pair_loss_and_grad(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> PairGradient {
    let d = center.len();
    assert_eq!(context.len(), d, "context dimension");
    let mut grad_center = vec![0.0; d];

    let s = dot(center, context);
    let sc = s.clamp(-MAX_LOGIT, MAX_LOGIT);
    let mut loss = neg_log_sigmoid(sc);
    // d/ds of -log s(s) is -(1 - s(s)).
    let coeff = if s.abs() > MAX_LOGIT { 0.0 } else { -(1.0 - sigmoid(sc)) };
    let grad_context: Vec<f64> = center.iter().map(|&c| coeff * c).collect();
    for (g, &v) in grad_center.iter_mut().zip(context) {
        *g += coeff * v;
    }

    let mut grad_negatives = Vec::with_capacity(negatives.len());
    for n in negatives {
        assert_eq!(n.len(), d, "negative dimension");
        let s = dot(center, n);
        let sc = s.clamp(-MAX_LOGIT, MAX_LOGIT);
        loss += neg_log_sigmoid(-sc);
        // d/ds of -log s(-s) is s(s).
        let coeff = if s.abs() > MAX_LOGIT { 0.0 } else { sigmoid(sc) };
        grad_negatives.push(center.iter().map(|&c| coeff * c).collect());
        for (g, &v) in grad_center.iter_mut().zip(n.iter()) {
            *g += coeff * v;
        }
    }

    PairGradient {
        loss,
        center: grad_center,
        context: grad_context,
        negatives: grad_negatives,
    }
}
