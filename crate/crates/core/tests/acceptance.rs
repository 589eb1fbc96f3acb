//! Acceptance suite. Each test prints one `[criterion N] PASS|FAIL ...` line (written
//! straight to stderr so it shows up without `--nocapture`) and then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use num_traits::Zero;
use polywell_core::exact::{dot, q, qf, qvec, sub, to_f64, Matrix, QVector, Rational};
use polywell_core::pwl::{AffinePiece, CpwlFunction, DualFace};
use polywell_core::reductions::{
    brute_force_l0, brute_force_partition, partition_to_instance, reduce_l0, tv_partition_instance,
    L0Instance, PartitionInstance,
};
use polywell_core::tvgraph::{
    ct_axis_instance, ct_axis_instance_with, in_tv_polytope, is_acyclic, nn_tv_vertices, tv_polytope_vertices, Graph, TvInstance,
};
use polywell_core::wellposed::{
    ill_posedness_number, monte_carlo_wellposedness, non_uniqueness_witness, solve_numeric_rational,
    tikhonov_well_posed, well_posedness, ExactSolver, ProblemInstance, Status,
};
use polywell_core::Budget;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NUMERIC_AGREEMENT: f64 = 1e-6;
const NUMERIC_TOL: f64 = 1e-11;
const DUALITY_LIMIT: Duration = Duration::from_secs(10);
const ORACLE_LIMIT: Duration = Duration::from_secs(300);
const REDUCTION_LIMIT: Duration = Duration::from_secs(120);

fn verdict_line(n: u32, ok: bool, detail: &str) {
    let line = format!("[criterion {n}] {} {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {n} failed: {detail}");
}

fn budget() -> Budget {
    Budget::default()
}

fn mat(rows: &[&[i64]]) -> Matrix {
    Matrix::from_i64(rows)
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, lo: i64, hi: i64) -> Matrix {
    let rows: Vec<QVector> = (0..m)
        .map(|_| (0..n).map(|_| q(rng.gen_range(lo..=hi))).collect())
        .collect();
    Matrix::from_rows(n, &rows).unwrap()
}

// ---------------------------------------------------------------------------------
// 1. dim(cell) + dim(subdifferential) = n and orthogonality, by independent routes.

/// Directions spanning the affine hull of a cell, from its V-description.
fn cell_directions(face: &DualFace) -> Vec<QVector> {
    let v = face.cell.to_v(&budget()).unwrap();
    let pts = v.points();
    let mut dirs: Vec<QVector> = pts.iter().skip(1).map(|p| sub(p, &pts[0])).collect();
    dirs.extend(v.rays().iter().cloned());
    dirs
}

fn subdiff_directions(face: &DualFace) -> Vec<QVector> {
    let v = face.subdiff.to_vpolyhedron(&budget()).unwrap();
    let pts = v.points();
    let mut dirs: Vec<QVector> = pts.iter().skip(1).map(|p| sub(p, &pts[0])).collect();
    dirs.extend(v.rays().iter().cloned());
    dirs
}

fn span_dim(n: usize, vs: &[QVector]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    Matrix::from_rows(n, vs).unwrap().rank()
}

#[test]
fn criterion_1_complex_duality() {
    let start = Instant::now();
    let mut nonneg_diff = CpwlFunction::l1(&mat(&[&[1, -1]]), &q(1)).unwrap();
    nonneg_diff = nonneg_diff.sum(&CpwlFunction::nonneg_indicator(2)).unwrap();
    let max_one_linf = CpwlFunction::max_affine(
        2,
        vec![
            AffinePiece::new(qvec(&[0, 0]), q(1)),
            AffinePiece::new(qvec(&[1, 0]), q(0)),
            AffinePiece::new(qvec(&[-1, 0]), q(0)),
            AffinePiece::new(qvec(&[0, 1]), q(0)),
            AffinePiece::new(qvec(&[0, -1]), q(0)),
        ],
    )
    .unwrap();
    let cases = [
        ("l1 n=2", CpwlFunction::l1_norm(2)),
        ("l1 n=3", CpwlFunction::l1_norm(3)),
        ("|x1-x2| + nonneg", nonneg_diff),
        ("max(1, linf)", max_one_linf),
    ];
    let mut pairs = 0;
    let mut problems = Vec::new();
    for (name, f) in &cases {
        let n = f.ambient_dim();
        for face in f.enumerate_complexes(&budget()).unwrap() {
            pairs += 1;
            let cd = cell_directions(&face);
            let sd = subdiff_directions(&face);
            let dc = span_dim(n, &cd);
            let ds = span_dim(n, &sd);
            if dc + ds != n || dc != face.dim_cell || ds != face.dim_subdiff {
                problems.push(format!("{name} {}: {dc} + {ds} != {n}", face.pattern));
            }
            if cd.iter().any(|c| sd.iter().any(|s| !dot(c, s).is_zero())) {
                problems.push(format!("{name} {}: directions not orthogonal", face.pattern));
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = problems.is_empty() && elapsed < DUALITY_LIMIT;
    verdict_line(
        1,
        ok,
        &format!(
            "{pairs} dual-face pairs over 4 functions, dimension sum and orthogonality exact, {:.2}s (limit {}s){}",
            elapsed.as_secs_f64(),
            DUALITY_LIMIT.as_secs(),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    );
}

// ---------------------------------------------------------------------------------
// 2. The complex of ‖·‖₁ in R²: origin, four half-axes, four quadrants.

#[test]
fn criterion_2_l1_plane_complex() {
    let f = CpwlFunction::l1_norm(2);
    let faces = f.enumerate_complexes(&budget()).unwrap();
    // (cell dimension, sorted subdifferential vertices)
    let mut got: Vec<(usize, Vec<QVector>)> = faces
        .iter()
        .map(|face| {
            let v = face.subdiff.to_vpolyhedron(&budget()).unwrap().vertices();
            (face.dim_cell, v)
        })
        .collect();
    got.sort();
    let square = vec![qvec(&[-1, -1]), qvec(&[-1, 1]), qvec(&[1, -1]), qvec(&[1, 1])];
    let mut expected: Vec<(usize, Vec<QVector>)> = vec![(0, square)];
    for (a, b) in [((1, -1), (1, 1)), ((-1, -1), (-1, 1)), ((-1, 1), (1, 1)), ((-1, -1), (1, -1))] {
        expected.push((1, vec![qvec(&[a.0, a.1]), qvec(&[b.0, b.1])]));
    }
    for (s1, s2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        expected.push((2, vec![qvec(&[s1, s2])]));
    }
    expected.sort();
    let ok = faces.len() == 9 && got == expected;
    verdict_line(
        2,
        ok,
        &format!(
            "{} cells / {} dual faces (expected 9/9); cell dims 1x0 + 4x1 + 4x2 with subdifferentials square, edges, corners",
            faces.len(),
            got.len()
        ),
    );
}

// ---------------------------------------------------------------------------------
// 3. Verdict against a brute-force uniqueness oracle over a grid of data vectors.

fn random_instance(rng: &mut ChaCha8Rng) -> ProblemInstance {
    let n = rng.gen_range(1..=4usize);
    let m = rng.gen_range(1..=4usize);
    let a = random_matrix(rng, m, n, -3, 3);
    let f = match rng.gen_range(0..3) {
        0 => CpwlFunction::l1_norm(n),
        1 if n >= 2 => {
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            let edges = if edges.is_empty() { vec![(0, 1)] } else { edges };
            TvInstance::new(Graph::new(n, &edges).unwrap(), q(1), false)
                .unwrap()
                .function()
                .unwrap()
        }
        _ => {
            let k = rng.gen_range(1..=3usize);
            CpwlFunction::l1(&random_matrix(rng, k, n, -3, 3), &q(1)).unwrap()
        }
    };
    ProblemInstance::new(a, f).unwrap()
}

/// Searches a grid of data vectors for one with two distinct exact minimizers.
fn oracle_finds_non_uniqueness(inst: &ProblemInstance, rng: &mut ChaCha8Rng) -> bool {
    let mut solver = ExactSolver::new(inst, &budget()).unwrap();
    let m = inst.m();
    let mut grid: Vec<QVector> = Vec::new();
    if m <= 2 {
        let r: Vec<i64> = (-6..=6).step_by(2).collect();
        let mut idx = vec![0usize; m];
        loop {
            grid.push(idx.iter().map(|&i| q(r[i])).collect());
            let mut k = 0;
            while k < m {
                idx[k] += 1;
                if idx[k] < r.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == m {
                break;
            }
        }
    }
    for _ in 0..40 {
        grid.push((0..m).map(|_| qf(rng.gen_range(-24..=24), 2)).collect());
    }
    for b in grid {
        let s = solver.solve(&b).expect("bounded-below regularizers always have minimizers");
        assert!(s.fermat_verified);
        if let Some(d) = &s.flat_direction {
            let y: QVector = s.minimizer.iter().zip(d).map(|(a, b)| a + b).collect();
            assert!(inst.fermat_holds(&b, &y).unwrap(), "flat direction leaves the optimal set");
            return true;
        }
    }
    false
}

#[test]
fn criterion_3_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let total = 200;
    let mut agree = 0;
    let mut ill = 0;
    let mut certified = 0;
    let mut mismatches = Vec::new();
    for k in 0..total {
        let inst = random_instance(&mut rng);
        let v = well_posedness(&inst, &budget()).unwrap();
        let oracle_ill = oracle_finds_non_uniqueness(&inst, &mut rng);
        let verdict_ill = v.status == Status::IllPosed;
        if verdict_ill {
            ill += 1;
            let face = v.offending_face.as_ref().unwrap();
            let cert = non_uniqueness_witness(&inst, face, v.row_space_witness.as_ref().unwrap()).unwrap();
            if cert.verify(&inst).unwrap() {
                certified += 1;
            }
        }
        if oracle_ill == verdict_ill {
            agree += 1;
        } else {
            mismatches.push(format!("#{k} A={:?} verdict={:?}", inst.a(), v.status));
        }
    }
    let elapsed = start.elapsed();
    let ok = agree == total && certified == ill && elapsed < ORACLE_LIMIT;
    verdict_line(
        3,
        ok,
        &format!(
            "{agree}/{total} verdicts match the grid oracle ({ill} ill-posed, {certified} certificates verified), {:.1}s (limit {}s){}",
            elapsed.as_secs_f64(),
            ORACLE_LIMIT.as_secs(),
            if mismatches.is_empty() { String::new() } else { format!("; {}", mismatches.join("; ")) }
        ),
    );
}

// ---------------------------------------------------------------------------------
// 4. The CT construction on a 3x3 image, checked literally.

#[test]
fn criterion_4_ct_figure() {
    let figure = vec![qvec(&[-2, 1, -3]), qvec(&[1, 4, 0]), qvec(&[-3, 0, -4])];
    let r = ct_axis_instance(3).unwrap();
    let rows = r.grid_rows();
    let point_matches = rows == figure;
    let certificate = r.certified() && r.orientation.as_ref().is_some_and(|u| is_acyclic(&Graph::grid(3), u).unwrap());
    let ok = point_matches && certificate;
    let shown: Vec<String> = rows.iter().map(|row| polywell_core::exact::format_vector(row)).collect();
    // The residual that literally produces the block, and the corner of the 4x4 instance.
    let literal = ct_axis_instance_with(3, &qvec(&[-1, 2, -2, -1, 2, -2])).unwrap();
    let literal_block = literal.grid_rows() == figure;
    let literal_in_polytope = in_tv_polytope(&Graph::grid(3), &literal.point).unwrap();
    let four = ct_axis_instance(4).unwrap();
    let corner: Vec<QVector> = four.grid_rows()[..3].iter().map(|row| row[..3].to_vec()).collect();
    let corner_ok = corner == figure && four.certified();
    verdict_line(
        4,
        ok,
        &format!(
            "ct_axis_instance(3) gives A^T z = [{}], figure block match {point_matches}, acyclic certificate {certificate}; \
             z = (-1, 2, -2) reproduces the block ({literal_block}) and lies in the 3x3 TV polytope: {literal_in_polytope}; \
             the block is the certified top-left corner of N = 4: {corner_ok}",
            shown.join(", ")
        ),
    );
}

// ---------------------------------------------------------------------------------
// 5. TV vertex counts.

/// Every labelled tree on `k` nodes, via Prüfer sequences.
fn labelled_trees(k: usize) -> Vec<Graph> {
    if k == 1 {
        return vec![Graph::new(1, &[]).unwrap()];
    }
    if k == 2 {
        return vec![Graph::path(2)];
    }
    let len = k - 2;
    let mut out = Vec::new();
    let total = k.pow(len as u32);
    for code in 0..total {
        let mut seq = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            seq.push(c % k);
            c /= k;
        }
        let mut degree = vec![1usize; k];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::new();
        for &s in &seq {
            let leaf = (0..k).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf, s));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..k).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(Graph::new(k, &edges).unwrap());
    }
    out
}

#[test]
fn criterion_5_tv_vertex_counts() {
    let b = budget();
    let triangle = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    let tri = tv_polytope_vertices(&triangle, &b).unwrap();
    let mut ok = tri.len() == 6;
    let mut trees = 0;
    let mut tree_failures = 0;
    let mut nn_checked = 0;
    let mut nn_failures = 0;
    let mut check_nn = |g: &Graph, v: &[QVector]| {
        nn_checked += 1;
        if nn_tv_vertices(g, &b).unwrap() != v {
            nn_failures += 1;
        }
    };
    check_nn(&triangle, &tri);
    for k in 1..=6 {
        for g in labelled_trees(k) {
            trees += 1;
            let v = tv_polytope_vertices(&g, &b).unwrap();
            if v.len() != 1 << g.edge_count() {
                tree_failures += 1;
            }
            check_nn(&g, &v);
        }
    }
    let cyclic = [
        Graph::cycle(4),
        Graph::cycle(5),
        Graph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap(),
        Graph::grid(2),
    ];
    let mut cyclic_ok = true;
    for g in &cyclic {
        let v = tv_polytope_vertices(g, &b).unwrap();
        cyclic_ok &= v.len() < 1 << g.edge_count();
        check_nn(g, &v);
    }
    ok &= tree_failures == 0 && nn_failures == 0 && cyclic_ok;
    verdict_line(
        5,
        ok,
        &format!(
            "triangle {} vertices (expected 6); {trees} labelled trees with <= 5 edges, {tree_failures} off 2^E; NN-TV equals TV on {}/{nn_checked} graphs; cyclic graphs below 2^E: {cyclic_ok}",
            tri.len(),
            nn_checked - nn_failures
        ),
    );
}

// ---------------------------------------------------------------------------------
// 6. Reductions against brute force.

#[test]
fn criterion_6_reductions() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut l0_agree = 0;
    let mut l0_notes = Vec::new();
    for k in 0..20 {
        let b = random_matrix(&mut rng, 3, 5, -3, 3);
        let mut z0 = vec![Rational::zero(); 5];
        let support = rng.gen_range(1..=3);
        for _ in 0..support {
            z0[rng.gen_range(0..5)] = q(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
        }
        let y = b.mul_vec(&z0).unwrap();
        let inst = L0Instance::new(b, y, false).unwrap();
        let brute = brute_force_l0(&inst).unwrap();
        let number = ill_posedness_number(&reduce_l0(&inst).unwrap(), &budget()).unwrap().number;
        if number == Some(brute) {
            l0_agree += 1;
        } else {
            l0_notes.push(format!("l0 #{k}: brute {brute}, reduction {number:?}"));
        }
    }
    let mut part_agree = 0;
    let mut tv_agree = 0;
    let mut balanced = 0;
    for k in 0..20 {
        let len = rng.gen_range(2..=10);
        let weights: Vec<u64> = (0..len).map(|_| rng.gen_range(1..=12)).collect();
        let p = PartitionInstance::new(weights.clone()).unwrap();
        let exists = brute_force_partition(&p).unwrap();
        balanced += exists as usize;
        let verdict = well_posedness(&partition_to_instance(&p).unwrap(), &budget()).unwrap().status;
        if (verdict == Status::WellPosed) == !exists {
            part_agree += 1;
        } else {
            l0_notes.push(format!("partition #{k} {weights:?}: exists {exists}, verdict {verdict:?}"));
        }
        let tv = well_posedness(&tv_partition_instance(&p, false).unwrap(), &budget()).unwrap().status;
        if tv == verdict {
            tv_agree += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = l0_agree == 20 && part_agree == 20 && tv_agree == 20 && elapsed < REDUCTION_LIMIT;
    verdict_line(
        6,
        ok,
        &format!(
            "l0 {l0_agree}/20 match brute force; partition {part_agree}/20 verdicts equal NOT partition ({balanced} balanced); path-TV encoding agrees {tv_agree}/20; {:.1}s (limit {}s){}",
            elapsed.as_secs_f64(),
            REDUCTION_LIMIT.as_secs(),
            if l0_notes.is_empty() { String::new() } else { format!("; {}", l0_notes.join("; ")) }
        ),
    );
}

// ---------------------------------------------------------------------------------
// 7. Monte Carlo.

#[test]
fn criterion_7_monte_carlo() {
    let f = CpwlFunction::l1_norm(3);
    let r = monte_carlo_wellposedness(&f, 3, 100, 7, &budget()).unwrap();
    if !r.ill_posed_samples.is_empty() {
        let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
        let mut text = String::new();
        for (t, a) in r.ill_posed_trials.iter().zip(&r.ill_posed_samples) {
            text.push_str(&format!("trial {t}: {a:?}\n"));
        }
        std::fs::write(dir.join("criterion7_ill_posed.txt"), text).unwrap();
    }
    let ok = r.well_posed == 100 && r.p == Some(3);
    verdict_line(
        7,
        ok,
        &format!(
            "l1 in R^3, m = 3, 100 trials (seed 7): well-posed fraction {:.2} (p = {:?}, {} ill-posed persisted)",
            r.fraction().unwrap(),
            r.p,
            r.ill_posed
        ),
    );
}

// ---------------------------------------------------------------------------------
// 8. Affinity on common cells and numeric agreement.

#[test]
fn criterion_8_solution_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut instances = 0;
    let mut shared = 0;
    let mut affine = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    while instances < 50 {
        let n = rng.gen_range(1..=3usize);
        let m = rng.gen_range(n..=3usize);
        let a = random_matrix(&mut rng, m, n, -3, 3);
        let f = if rng.gen_bool(0.5) {
            CpwlFunction::l1_norm(n)
        } else {
            CpwlFunction::l1(&random_matrix(&mut rng, 2, n, -2, 2), &q(1)).unwrap()
        };
        let inst = ProblemInstance::new(a, f).unwrap();
        if well_posedness(&inst, &budget()).unwrap().status != Status::WellPosed {
            continue;
        }
        instances += 1;
        let b1: QVector = (0..m).map(|_| qf(rng.gen_range(-20..=20), 2)).collect();
        // Half the time stay close to b1 so the three solutions often share a cell.
        let b2: QVector = if rng.gen_bool(0.5) {
            b1.iter().map(|x| x + qf(rng.gen_range(-1..=1), 8)).collect()
        } else {
            (0..m).map(|_| qf(rng.gen_range(-20..=20), 2)).collect()
        };
        let lambda = qf(rng.gen_range(0..=4), 4);
        let mut solver = ExactSolver::new(&inst, &budget()).unwrap();
        let p = solver.probe(&b1, &b2, &lambda).unwrap();
        if p.shared_cell.is_some() {
            shared += 1;
            if p.affine == Some(true) {
                affine += 1;
            } else {
                failures.push(format!("instance {instances}: shared cell but not affine"));
            }
        }
        for (b, x) in [&b1, &b2, &p.mixed_b].into_iter().zip(&p.solutions) {
            let num = solve_numeric_rational(&inst, b, NUMERIC_TOL).unwrap();
            for (e, v) in x.iter().zip(&num.x) {
                worst = worst.max((to_f64(e) - v).abs());
            }
        }
    }
    let ok = failures.is_empty() && worst <= NUMERIC_AGREEMENT && shared > 0;
    verdict_line(
        8,
        ok,
        &format!(
            "50 well-posed instances: {affine}/{shared} shared-cell probes affine; max |x_num - x_exact| = {worst:.2e} (tolerance {NUMERIC_AGREEMENT:e}){}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    );
}

// ---------------------------------------------------------------------------------
// 9. Adding or removing measurements, l1 against l2.

fn status(a: &[&[i64]], f: &CpwlFunction) -> Status {
    let inst = ProblemInstance::new(mat(a), f.clone()).unwrap();
    well_posedness(&inst, &budget()).unwrap().status
}

#[test]
fn criterion_9_measurement_phenomena() {
    use Status::{IllPosed, WellPosed};
    let l1_3 = CpwlFunction::l1_norm(3);
    let l1_2 = CpwlFunction::l1_norm(2);
    let first = CpwlFunction::l1(&mat(&[&[1, 0]]), &q(1)).unwrap();
    let mut checks: Vec<(&str, Status, Status)> = vec![
        // Appending a row can break well-posedness...
        ("l1 R^3: A = [1 0 0]", status(&[&[1, 0, 0]], &l1_3), WellPosed),
        ("l1 R^3: A = [1 0 0; 1 1 1]", status(&[&[1, 0, 0], &[1, 1, 1]], &l1_3), IllPosed),
        // ...and can restore it.
        ("l1 R^2: A = [1 1]", status(&[&[1, 1]], &l1_2), IllPosed),
        ("l1 R^2: A = [1 1; 1 -1]", status(&[&[1, 1], &[1, -1]], &l1_2), WellPosed),
        // Changing the penalty instead of the measurements.
        ("|x1|, A = [1 0]", status(&[&[1, 0]], &first), IllPosed),
        ("l1, A = [1 0]", status(&[&[1, 0]], &l1_2), WellPosed),
        ("|x1|, A = [1 1]", status(&[&[1, 1]], &first), WellPosed),
        ("l1, A = [1 1]", status(&[&[1, 1]], &l1_2), IllPosed),
    ];
    // Removing rows: the same pairs read backwards.
    checks.push(("remove [1 1 1] from [1 0 0; 1 1 1]", status(&[&[1, 0, 0]], &l1_3), WellPosed));
    checks.push(("remove [1 -1] from [1 1; 1 -1]", status(&[&[1, 1]], &l1_2), IllPosed));
    let l1_ok = checks.iter().all(|(_, got, want)| got == want);

    // Tikhonov: well-posed iff null(A) ∩ null(L) = {0}, so extra rows never hurt.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut trials = 0;
    let mut flips = 0;
    let mut closed_form_ok = true;
    while trials < 200 {
        let n = rng.gen_range(1..=4usize);
        let ma = rng.gen_range(0..=n);
        let a = random_matrix(&mut rng, ma, n, -2, 2);
        let ml = rng.gen_range(0..=n);
        let l = random_matrix(&mut rng, ml, n, -2, 2);
        if !tikhonov_well_posed(&a, &l).unwrap() {
            continue;
        }
        trials += 1;
        let extra = random_matrix(&mut rng, 1, n, -2, 2);
        let a2 = a.stack(&extra).unwrap();
        let l2 = l.stack(&extra).unwrap();
        if !tikhonov_well_posed(&a2, &l).unwrap() || !tikhonov_well_posed(&a, &l2).unwrap() {
            flips += 1;
        }
        // The normal-equation solution has zero gradient.
        let b: QVector = (0..a.nrows()).map(|_| q(rng.gen_range(-3..=3))).collect();
        let c: QVector = (0..l.nrows()).map(|_| q(rng.gen_range(-3..=3))).collect();
        let x = polywell_core::wellposed::tikhonov_solve(&a, &l, &b, &c).unwrap().unwrap();
        let ga = a.tmul_vec(&sub(&a.mul_vec(&x).unwrap(), &b)).unwrap();
        let gl = l.tmul_vec(&sub(&l.mul_vec(&x).unwrap(), &c)).unwrap();
        closed_form_ok &= ga.iter().zip(&gl).all(|(p, r)| (p + r).is_zero());
    }
    let ok = l1_ok && flips == 0 && closed_form_ok;
    let failed: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| got != want)
        .map(|(name, got, want)| format!("{name}: got {got:?}, want {want:?}"))
        .collect();
    verdict_line(
        9,
        ok,
        &format!(
            "{}/{} pinned l1 verdicts (both flip directions for adding and removing rows); Tikhonov: {flips} flips over {trials} row additions, closed form exact: {closed_form_ok}{}",
            checks.len() - failed.len(),
            checks.len(),
            if failed.is_empty() { String::new() } else { format!("; {}", failed.join("; ")) }
        ),
    );
}
