//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.
//!
//! Run with `cargo test -p biokey-core --test acceptance`.

use std::collections::VecDeque;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use biokey_core::des::{self, key_schedule, tables};
use biokey_core::keygen::ReductionPlan;
use biokey_core::minutiae::{crossing_number, Window};
use biokey_core::{
    derive_key, histogram_equalize, load_gray, reduce_key, thin_with_stats, BinaryImage, BitString,
    Block64, DesKey, GrayImage, MinutiaKind, PipelineConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIXTURE: &[u8] = include_bytes!("fixtures/synthetic_fingerprint.pgm");
const GOLDEN_KEY: &str = "1B77276870A23344";

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    check: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            name: "des-known-vector",
            limit: Duration::from_secs(1),
            check: des_known_vector,
        },
        Criterion {
            name: "des-properties",
            limit: Duration::from_secs(10),
            check: des_properties,
        },
        Criterion {
            name: "crossing-number-table",
            limit: Duration::from_secs(1),
            check: crossing_number_table,
        },
        Criterion {
            name: "thinning-invariants",
            limit: Duration::from_secs(5),
            check: thinning_invariants,
        },
        Criterion {
            name: "key-reduction",
            limit: Duration::from_secs(5),
            check: key_reduction,
        },
        Criterion {
            name: "histogram-equalization",
            limit: Duration::from_secs(5),
            check: histogram_equalization,
        },
        Criterion {
            name: "end-to-end",
            limit: Duration::from_secs(5),
            check: end_to_end,
        },
    ];

    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(e) => (false, e),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} {:<24} {:>8.3}s (limit {}s)  {}",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn des_known_vector() -> Outcome {
    let key = DesKey::new(0x1334_5779_9BBC_DFF1);
    let schedule = key_schedule(key);
    ensure!(
        schedule.round_key(0) == 0x1B02_EFFC_7072,
        "K1 = {:012X}",
        schedule.round_key(0)
    );
    let c = des::encrypt_block(Block64(0x0123_4567_89AB_CDEF), &schedule);
    ensure!(c.0 == 0x85E8_1354_0F0A_B405, "ciphertext {:016X}", c.0);
    let p = des::decrypt_block(c, &schedule);
    ensure!(p.0 == 0x0123_4567_89AB_CDEF, "decrypted {:016X}", p.0);
    Ok("85E813540F0AB405, K1 1B02EFFC7072".into())
}

fn des_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xDE5);
    for _ in 0..10_000 {
        let schedule = key_schedule(DesKey::new(rng.gen()));
        let p = Block64(rng.gen());
        let back = des::decrypt_block(des::encrypt_block(p, &schedule), &schedule);
        ensure!(back == p, "round trip failed for {:016X}", p.0);
    }
    for _ in 0..1000 {
        let (k, p): (u64, u64) = (rng.gen(), rng.gen());
        let c = des::encrypt_block(Block64(p), &key_schedule(DesKey::new(k)));
        let cc = des::encrypt_block(Block64(!p), &key_schedule(DesKey::new(!k)));
        ensure!(
            cc.0 == !c.0,
            "complement property fails for k={k:016X} p={p:016X}"
        );
    }
    for i in 0..64 {
        let x = 1u64 << i;
        ensure!(
            des::permute(&tables::FP, des::permute(&tables::IP, x, 64), 64) == x,
            "FP(IP(bit {i}))"
        );
    }
    for _ in 0..1000 {
        let x: u64 = rng.gen();
        ensure!(
            des::permute(&tables::FP, des::permute(&tables::IP, x, 64), 64) == x,
            "FP(IP({x:016X}))"
        );
    }
    for (b, sbox) in tables::S.iter().enumerate() {
        for (r, row) in sbox.iter().enumerate() {
            let mut sorted = *row;
            sorted.sort_unstable();
            ensure!(
                sorted == std::array::from_fn(|i| i as u8),
                "S{} row {r} is not a permutation",
                b + 1
            );
        }
    }
    Ok("10000 round trips, 1000 complement pairs, IP/FP inverse, 32 S-box rows".into())
}

/// Transitions around the neighbourhood, walked from the top-left corner clockwise.
fn crossing_number_oracle(center: (usize, usize), cell: impl Fn(usize, usize) -> u8) -> u8 {
    let (cx, cy) = center;
    let walk = [
        (cx - 1, cy - 1),
        (cx, cy - 1),
        (cx + 1, cy - 1),
        (cx + 1, cy),
        (cx + 1, cy + 1),
        (cx, cy + 1),
        (cx - 1, cy + 1),
        (cx - 1, cy),
    ];
    let changes = walk
        .iter()
        .zip(walk.iter().cycle().skip(1))
        .filter(|(&(ax, ay), &(bx, by))| cell(ax, ay) != cell(bx, by))
        .count();
    (changes / 2) as u8
}

fn crossing_number_table() -> Outcome {
    let expected_names = [
        "isolated",
        "ending",
        "continuing",
        "bifurcation",
        "crossing",
    ];
    let mut histogram = [0usize; 5];
    for mask in 0u16..256 {
        // neighbours in row-major order, skipping the centre
        let cells: Vec<(usize, usize)> =
            (0..9).filter(|&i| i != 4).map(|i| (i % 3, i / 3)).collect();
        let mut window: Window = [[0; 3]; 3];
        window[1][1] = 1;
        for (bit, &(x, y)) in cells.iter().enumerate() {
            window[y][x] = (mask >> bit & 1) as u8;
        }
        let cn = crossing_number(&window);
        let oracle = crossing_number_oracle((1, 1), |x, y| window[y][x]);
        ensure!(cn == oracle, "mask {mask:08b}: got {cn}, oracle {oracle}");
        let kind = MinutiaKind::from_crossing_number(cn).ok_or(format!("no class for CN {cn}"))?;
        ensure!(
            kind.as_str() == expected_names[cn as usize],
            "CN {cn} classified as {kind}"
        );
        histogram[cn as usize] += 1;
    }
    ensure!(histogram.iter().sum::<usize>() == 256, "coverage");
    Ok(format!("256 neighbourhoods, CN 0..4 counts {histogram:?}"))
}

fn components(img: &BinaryImage) -> usize {
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for start in 0..w * h {
        if seen[start] || img.get(start % w, start / w) == 0 {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if !seen[j] && img.get(nx as usize, ny as usize) == 1 {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    count
}

fn has_full_2x2(img: &BinaryImage) -> bool {
    (0..img.height().saturating_sub(1)).any(|y| {
        (0..img.width().saturating_sub(1)).any(|x| {
            img.get(x, y) & img.get(x + 1, y) & img.get(x, y + 1) & img.get(x + 1, y + 1) == 1
        })
    })
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

type Segment = ((f64, f64), (f64, f64));

fn strokes(size: usize, segments: &[Segment], radius: f64) -> BinaryImage {
    BinaryImage::from_fn(size, size, |x, y| {
        segments
            .iter()
            .any(|&(a, b)| segment_distance((x as f64, y as f64), a, b) <= radius)
    })
}

fn annulus(size: usize, inner: f64, outer: f64) -> BinaryImage {
    let c = size as f64 / 2.0;
    BinaryImage::from_fn(size, size, |x, y| {
        let r = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt();
        (inner..=outer).contains(&r)
    })
}

fn blob(seed: u64) -> BinaryImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let disks: Vec<(f64, f64, f64)> = (0..rng.gen_range(3..8))
        .map(|_| {
            (
                rng.gen_range(8.0..40.0),
                rng.gen_range(8.0..40.0),
                rng.gen_range(2.5..7.0),
            )
        })
        .collect();
    BinaryImage::from_fn(48, 48, |x, y| {
        disks
            .iter()
            .any(|&(cx, cy, r)| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r)
    })
}

fn thinning_shapes() -> Vec<(String, BinaryImage)> {
    let mut shapes = vec![
        (
            "bar-h3".into(),
            BinaryImage::from_fn(30, 9, |x, y| (3..27).contains(&x) && (3..6).contains(&y)),
        ),
        (
            "bar-v5".into(),
            BinaryImage::from_fn(11, 30, |x, y| (3..8).contains(&x) && (2..28).contains(&y)),
        ),
        (
            "bar-h4".into(),
            BinaryImage::from_fn(40, 10, |x, y| (2..38).contains(&x) && (3..7).contains(&y)),
        ),
        (
            "bar-diag".into(),
            strokes(32, &[((4.0, 4.0), (27.0, 27.0))], 1.5),
        ),
        (
            "y-junction".into(),
            strokes(
                40,
                &[
                    ((20.0, 20.0), (20.0, 36.0)),
                    ((20.0, 20.0), (6.0, 5.0)),
                    ((20.0, 20.0), (34.0, 5.0)),
                ],
                1.6,
            ),
        ),
        (
            "y-thick".into(),
            strokes(
                40,
                &[
                    ((20.0, 18.0), (20.0, 36.0)),
                    ((20.0, 18.0), (8.0, 4.0)),
                    ((20.0, 18.0), (32.0, 4.0)),
                ],
                2.6,
            ),
        ),
        (
            "t-junction".into(),
            strokes(
                40,
                &[((4.0, 8.0), (36.0, 8.0)), ((20.0, 8.0), (20.0, 35.0))],
                2.0,
            ),
        ),
        (
            "l-shape".into(),
            strokes(
                40,
                &[((6.0, 5.0), (6.0, 34.0)), ((6.0, 34.0), (34.0, 34.0))],
                2.0,
            ),
        ),
        (
            "plus".into(),
            strokes(
                40,
                &[((4.0, 20.0), (36.0, 20.0)), ((20.0, 4.0), (20.0, 36.0))],
                2.0,
            ),
        ),
        ("annulus-small".into(), annulus(32, 6.0, 10.0)),
        ("annulus-large".into(), annulus(48, 12.0, 16.0)),
        (
            "frame".into(),
            BinaryImage::from_fn(30, 30, |x, y| {
                let inside = (3..27).contains(&x) && (3..27).contains(&y);
                let hole = (6..24).contains(&x) && (6..24).contains(&y);
                inside && !hole
            }),
        ),
        ("figure-eight".into(), {
            let (a, b) = (annulus(48, 5.0, 8.0), annulus(48, 5.0, 8.0));
            BinaryImage::from_fn(48, 48, |x, y| {
                a.get_or_zero(x as isize - 7, y as isize) == 1
                    || b.get_or_zero(x as isize + 7, y as isize) == 1
            })
        }),
        (
            "stripes-diag".into(),
            BinaryImage::from_fn(40, 40, |x, y| (x + y) % 9 < 4),
        ),
        (
            "square-8".into(),
            BinaryImage::from_fn(12, 12, |x, y| (2..10).contains(&x) && (2..10).contains(&y)),
        ),
    ];
    for seed in 0..10 {
        shapes.push((format!("blob-{seed}"), blob(seed)));
    }
    shapes
}

fn thinning_invariants() -> Outcome {
    let shapes = thinning_shapes();
    for (name, img) in &shapes {
        let outcome = thin_with_stats(img);
        let skeleton = &outcome.skeleton;
        ensure!(
            !has_full_2x2(skeleton),
            "{name}: 2x2 block left\n{}",
            skeleton.to_ascii()
        );
        ensure!(
            thin_with_stats(skeleton).skeleton == *skeleton,
            "{name}: not idempotent"
        );
        let (before, after) = (components(img), components(skeleton));
        ensure!(
            before == after,
            "{name}: {before} components became {after}\n{}",
            skeleton.to_ascii()
        );
        ensure!(skeleton.count_foreground() > 0, "{name}: vanished");
    }
    Ok(format!(
        "{} shapes: no 2x2, idempotent, components preserved",
        shapes.len()
    ))
}

/// Where each of the 64 output bits comes from in the original key set,
/// found by walking the passes backwards from the final 64-bit window.
fn reduction_sources(usable_bits: usize) -> Vec<usize> {
    let lengths: Vec<usize> = (1..=usable_bits / 64).map(|k| 64 * k).collect();
    let mut sources = Vec::with_capacity(64);
    for out in 0..64 {
        let mut pos = out;
        // lengths[k] is the length before the pass that produced lengths[k-1]
        for &len in &lengths[1..] {
            let half = (len - 64) / 2;
            pos = if pos < half {
                32 + half + pos
            } else {
                32 + pos - half
            };
        }
        sources.push(pos);
    }
    sources
}

fn key_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x64);
    let mut checked = 0;
    for len in (128..=1024).step_by(8) {
        let bits: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
        let plan = ReductionPlan::for_len(len);
        let sources = reduction_sources(plan.usable_bits);
        ensure!(
            sources.len() == 64,
            "len {len}: {} output bits",
            sources.len()
        );
        ensure!(
            sources.iter().all(|&s| s < plan.usable_bits),
            "len {len}: source beyond usable bits"
        );

        let key =
            reduce_key(&BitString::from(bits.clone())).map_err(|e| format!("len {len}: {e}"))?;
        let expected = sources
            .iter()
            .fold(0u64, |acc, &s| acc << 1 | bits[s] as u64);
        ensure!(
            key.bits() == expected,
            "len {len}: {:016X} != oracle {expected:016X}",
            key.bits()
        );

        for trailing in plan.usable_bits..len {
            let mut flipped = bits.clone();
            flipped[trailing] = !flipped[trailing];
            let k = reduce_key(&BitString::from(flipped)).unwrap();
            ensure!(
                k == key,
                "len {len}: trimmed bit {trailing} changed the key"
            );
        }
        for (out, &src) in sources.iter().enumerate() {
            let mut flipped = bits.clone();
            flipped[src] = !flipped[src];
            let k = reduce_key(&BitString::from(flipped)).unwrap();
            ensure!(
                k.bits() ^ key.bits() == 1u64 << (63 - out),
                "len {len}: bit {src} does not map to {out}"
            );
        }
        checked += 1;
    }
    Ok(format!("{checked} lengths against index-traced oracle"))
}

fn histogram_equalization() -> Outcome {
    for v in [0u8, 1, 77, 128, 254, 255] {
        let (eq, _) = histogram_equalize(&GrayImage::filled(17, 9, v).unwrap());
        ensure!(
            eq.pixels().iter().all(|&p| p == 255),
            "constant {v} did not map to 255"
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4157);
    for i in 0..100 {
        let (w, h) = (rng.gen_range(1..64), rng.gen_range(1..64));
        let (lo, hi) = {
            let a: u8 = rng.gen();
            let b: u8 = rng.gen();
            (a.min(b), a.max(b))
        };
        let samples: Vec<u8> = (0..w * h).map(|_| rng.gen_range(lo..=hi)).collect();
        let img = GrayImage::new(w, h, samples).unwrap();
        let (once, map) = histogram_equalize(&img);
        ensure!(
            map.mapping.windows(2).all(|p| p[0] <= p[1]),
            "image {i}: mapping not monotone"
        );
        for (&src, &dst) in img.pixels().iter().zip(once.pixels()) {
            ensure!(
                map.mapping[src as usize] == dst,
                "image {i}: pixel not mapped through table"
            );
        }
        let (twice, _) = histogram_equalize(&once);
        let worst = once
            .pixels()
            .iter()
            .zip(twice.pixels())
            .map(|(&a, &b)| a.abs_diff(b))
            .max()
            .unwrap();
        ensure!(
            worst <= 1,
            "image {i}: second pass moved a pixel by {worst}"
        );
    }
    Ok("constant images, 100 random images monotone and stable within 1 level".into())
}

fn end_to_end() -> Outcome {
    let img = load_gray(FIXTURE).map_err(|e| e.to_string())?;
    let cfg = PipelineConfig::default();
    let key = derive_key(&img, &cfg).map_err(|e| e.to_string())?;
    ensure!(
        key.to_hex() == GOLDEN_KEY,
        "fixture key {key}, expected {GOLDEN_KEY}"
    );
    let again = derive_key(&img, &cfg).map_err(|e| e.to_string())?;
    ensure!(again == key, "second run produced {again}");

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (plain_path, cipher_path) = (
        dir.path().join("message.txt"),
        dir.path().join("message.hex"),
    );
    let message = "The quick brown fox jumps over the lazy dog.\nSecond line, odd length!\n";
    std::fs::write(&plain_path, message).map_err(|e| e.to_string())?;

    let plain = std::fs::read(&plain_path).map_err(|e| e.to_string())?;
    let cipher = des::encrypt_text(&plain, key);
    let hex: String = cipher.iter().map(|b| format!("{b:02X}")).collect();
    std::fs::write(&cipher_path, &hex).map_err(|e| e.to_string())?;

    let hex = std::fs::read_to_string(&cipher_path).map_err(|e| e.to_string())?;
    let bytes: Vec<u8> = (0..hex.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let recovered = des::decrypt_text(&bytes, key).map_err(|e| e.to_string())?;
    ensure!(recovered == message.as_bytes(), "decrypted text differs");
    Ok(format!(
        "key {key}, deterministic, {}-byte text round trip",
        message.len()
    ))
}
