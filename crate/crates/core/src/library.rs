//! Constructors for the small groups used throughout the test corpus.

use crate::structure::{Dynamic, ElementId, InteractionStructure};

fn names<I: IntoIterator<Item = S>, S: Into<String>>(it: I) -> Vec<String> {
    it.into_iter().map(Into::into).collect()
}

/// Cyclic group `Z_n` on tokens `0..n-1`.
pub fn cyclic(n: usize) -> InteractionStructure {
    InteractionStructure::from_fn(format!("Z{n}"), names((0..n).map(|i| i.to_string())), |a, b| {
        (a + b) % n
    })
    .with_group_data(ElementId(0))
}

/// `Z_n` with the inversion automorphism declared as dynamic `inv`.
pub fn cyclic_with_inversion(n: usize) -> InteractionStructure {
    cyclic(n).with_dynamic(Dynamic::new("inv", (0..n).map(|a| ElementId((n - a) % n)).collect()))
}

/// `Z_m × Z_n` with tokens `ab` (single digits) in lexicographic order.
pub fn product(m: usize, n: usize) -> InteractionStructure {
    assert!(m <= 10 && n <= 10);
    let tokens = (0..m).flat_map(|a| (0..n).map(move |b| format!("{a}{b}")));
    InteractionStructure::from_fn(format!("Z{m}xZ{n}"), names(tokens), |x, y| {
        let (a1, b1) = (x / n, x % n);
        let (a2, b2) = (y / n, y % n);
        ((a1 + a2) % m) * n + (b1 + b2) % n
    })
    .with_group_data(ElementId(0))
}

/// Klein four-group on tokens `e a b c`.
pub fn klein() -> InteractionStructure {
    let mut s =
        InteractionStructure::from_fn("V4", names(["e", "a", "b", "c"]), |x, y| x ^ y).with_group_data(ElementId(0));
    s.name = "V4".into();
    s
}

/// Quaternion group on tokens `1 -1 i -i j -j k -k`.
pub fn quaternion() -> InteractionStructure {
    // unit index u ∈ {1,i,j,k} and sign bit; token index = 2u + sign
    const UNIT: [[(usize, bool); 4]; 4] = [
        [(0, false), (1, false), (2, false), (3, false)],
        [(1, false), (0, true), (3, false), (2, true)],
        [(2, false), (3, true), (0, true), (1, false)],
        [(3, false), (2, false), (1, true), (0, true)],
    ];
    InteractionStructure::from_fn("Q8", names(["1", "-1", "i", "-i", "j", "-j", "k", "-k"]), |x, y| {
        let (u, su) = (x / 2, x % 2 == 1);
        let (v, sv) = (y / 2, y % 2 == 1);
        let (w, sw) = UNIT[u][v];
        2 * w + usize::from(su ^ sv ^ sw)
    })
    .with_group_data(ElementId(0))
}

/// `Q8` with conjugation by `i` declared as dynamic `conj_i`.
pub fn quaternion_with_conjugation() -> InteractionStructure {
    let q8 = quaternion();
    let i = q8.find("i").unwrap();
    let i_inv = q8.inverse(i).unwrap();
    let map = q8.ids().map(|p| q8.compose(q8.compose(i, p), i_inv)).collect();
    q8.with_dynamic(Dynamic::new("conj_i", map))
}

/// Dihedral group of order 8 on tokens `e r r2 r3 s sr sr2 sr3`, with
/// `s·r = r⁻¹·s`.
pub fn dihedral4() -> InteractionStructure {
    // element s^f r^k has index 4f + k
    InteractionStructure::from_fn("D4", names(["e", "r", "r2", "r3", "s", "sr", "sr2", "sr3"]), |x, y| {
        let (f1, k1) = (x / 4, x % 4);
        let (f2, k2) = (y / 4, y % 4);
        // s^f1 r^k1 s^f2 r^k2 = s^(f1+f2) r^(±k1 + k2)
        let k1 = if f2 == 1 { (4 - k1) % 4 } else { k1 };
        4 * ((f1 + f2) % 2) + (k1 + k2) % 4
    })
    .with_group_data(ElementId(0))
}

/// Symmetric group on three points, composed as functions
/// (`(a⋆b)(x) = a(b(x))`), on tokens `e (12) (13) (23) (123) (132)`.
pub fn symmetric3() -> InteractionStructure {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
    InteractionStructure::from_fn("S3", names(["e", "(12)", "(13)", "(23)", "(123)", "(132)"]), |x, y| {
        let composed = [0, 1, 2].map(|p| PERMS[x][PERMS[y][p]]);
        PERMS.iter().position(|q| *q == composed).unwrap()
    })
    .with_group_data(ElementId(0))
}

/// Heisenberg group of unitriangular 3×3 matrices over `Z_3`. The element
/// `(a,b,c)` has token `abc` and multiplies as
/// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
pub fn heisenberg3() -> InteractionStructure {
    let tokens = (0..27).map(|i| format!("{}{}{}", i / 9, (i / 3) % 3, i % 3));
    InteractionStructure::from_fn("Heis3", names(tokens), |x, y| {
        let (a1, b1, c1) = (x / 9, (x / 3) % 3, x % 3);
        let (a2, b2, c2) = (y / 9, (y / 3) % 3, y % 3);
        ((a1 + a2) % 3) * 9 + ((b1 + b2) % 3) * 3 + (c1 + c2 + a1 * b2) % 3
    })
    .with_group_data(ElementId(0))
}

/// One-element group.
pub fn trivial() -> InteractionStructure {
    InteractionStructure::from_fn("trivial", names(["e"]), |_, _| 0).with_group_data(ElementId(0))
}

/// The fixture corpus, in a fixed order, keyed by file stem.
pub fn corpus() -> Vec<(&'static str, InteractionStructure)> {
    vec![
        ("z2", cyclic_with_inversion(2)),
        ("z3", cyclic_with_inversion(3)),
        ("z4", cyclic_with_inversion(4)),
        ("z8", cyclic_with_inversion(8)),
        ("v4", klein()),
        ("z2xz4", product(2, 4)),
        ("q8", quaternion_with_conjugation()),
        ("d4", dihedral4()),
        ("s3", symmetric3()),
        ("heis3", heisenberg3()),
    ]
}
