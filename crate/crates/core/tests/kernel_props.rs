//! Kernel properties over seeded random codes.

#[path = "support/codegen.rs"]
mod codegen;
#[path = "support/props.rs"]
mod props;

use obtt_core::syntax::{parse, print, print_file};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use codegen::{open_context, CodeGen};

const GEN: CodeGen = CodeGen { open: 2, max_level: 2 };

fn run_one(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cx = open_context(GEN.open);
    let level = GEN.level(&mut rng);
    let c = GEN.code(&mut rng, level, 0, 3);
    props::decode_agrees(&cx, &c, level)?;
    props::lift_normal_form(&cx, &c, level)?;
    props::proofs_irrelevant(&cx, &c, level)?;
    let p = GEN.pi_code(&mut rng, level, 2);
    let q = if rand::Rng::gen_bool(&mut rng, 0.5) { p.clone() } else { GEN.pi_code(&mut rng, level, 2) };
    props::pi_injective(&cx, level, (&p.0, &p.1), (&q.0, &q.1))
}

#[test]
fn a_thousand_seeded_codes() {
    for seed in 0..1000 {
        if let Err(e) = run_one(seed) {
            panic!("seed {seed}: {e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_properties_hold(seed in any::<u64>()) {
        prop_assert_eq!(run_one(seed), Ok(()));
    }

    #[test]
    fn printed_codes_parse_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let closed = CodeGen { open: 0, max_level: 2 };
        let c = closed.code(&mut rng, 1, 0, 6);
        let src = format!("def c : V 1 := {}\n", print(&c));
        let file = parse(&src).map_err(|e| TestCaseError::fail(format!("{src}: {e}")))?;
        let again = parse(&print_file(&file)).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(file.declarations.len(), again.declarations.len());
        for (x, y) in file.declarations.iter().zip(&again.declarations) {
            prop_assert_eq!(&x.body, &y.body);
        }
    }
}

