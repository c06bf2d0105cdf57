//! Seeded random SLEEC documents small enough for the oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub seed: u64,
    pub source: String,
    pub max_points: usize,
    pub horizon: u64,
}

const EVENTS: [&str; 4] = ["A", "B", "C", "D"];
const MEASURES: [&str; 2] = ["p", "q"];

struct Gen {
    rng: ChaCha8Rng,
    events: usize,
    measures: usize,
}

impl Gen {
    fn event(&mut self) -> &'static str {
        EVENTS[self.rng.gen_range(0..self.events)]
    }

    fn literal(&mut self) -> Option<String> {
        if self.measures == 0 {
            return None;
        }
        let m = MEASURES[self.rng.gen_range(0..self.measures)];
        Some(if self.rng.gen_bool(0.5) {
            m.to_string()
        } else {
            format!("(not {m})")
        })
    }

    fn response(&mut self, depth: usize) -> String {
        let mut s = String::new();
        if self.rng.gen_bool(0.4) {
            s.push_str("not ");
        }
        s.push_str(self.event());
        let d = self.rng.gen_range(1..=2);
        s.push_str(&format!(" within {d} seconds"));
        if depth == 0 && self.rng.gen_bool(0.15) {
            s.push_str(" otherwise ");
            s.push_str(&self.response(1));
        }
        s
    }

    fn trigger(&mut self) -> String {
        let mut s = format!("when {}", self.event());
        if self.rng.gen_bool(0.4) {
            if let Some(l) = self.literal() {
                s.push_str(" and ");
                s.push_str(&l);
            }
        }
        s
    }
}

/// A random instance for `seed`: 2–3 events, up to 2 boolean measures,
/// 1–4 rules with deadlines of 1 or 2 seconds, one concern and one purpose.
pub fn generate(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let events = rng.gen_range(2..=3);
    let measures = rng.gen_range(0..=(4 - events).min(2));
    let max_points = if events + measures <= 3 {
        rng.gen_range(2..=3)
    } else {
        2
    };
    let horizon = rng.gen_range(3..=4);
    let mut g = Gen { rng, events, measures };

    let mut src = String::from("def_start\n");
    for e in &EVENTS[..events] {
        src.push_str(&format!("  event {e}\n"));
    }
    for m in &MEASURES[..measures] {
        src.push_str(&format!("  measure {m}: boolean\n"));
    }
    src.push_str("def_end\n\nrule_start\n");
    let rules = g.rng.gen_range(1..=4);
    for i in 0..rules {
        let mut rule = format!("  r{i} {} then {}", g.trigger(), g.response(0));
        if g.rng.gen_bool(0.3) {
            if let Some(l) = g.literal() {
                rule.push_str(&format!(" unless {l}"));
                if g.rng.gen_bool(0.5) {
                    rule.push_str(&format!(" then {}", g.response(1)));
                }
            }
        }
        src.push_str(&rule);
        src.push('\n');
    }
    src.push_str("rule_end\n\n");
    for (block, id) in [("concern", "c0"), ("purpose", "p0")] {
        let resp = g.response(1);
        let trig = g.trigger();
        src.push_str(&format!("{block}_start\n  {id} {trig} then {resp}\n{block}_end\n\n"));
    }
    Instance {
        seed,
        source: src,
        max_points,
        horizon,
    }
}
