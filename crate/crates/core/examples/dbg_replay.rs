use schemes_core::forcing::{Demand, Fragment};
use schemes_core::ord::ext;
use schemes_core::{Scheme, TypeSpec};

fn main() {
    let mut fr = Fragment::new(Scheme::new(TypeSpec::binary()));
    fr.generic_build(0, &[Demand::Rank { k: 7 }]).unwrap();
    fr.generic_build(
        1,
        &[
            Demand::Root { beta: ext(2, 2), k: 1 },
            Demand::Contain { alpha: 3 },
        ],
    )
    .unwrap();
    for chain in 0..fr.blocks() {
        println!("--- chain {chain}: {} lines", fr.log_lines(chain).len());
        for line in fr.log_lines(chain) {
            println!("{line}");
        }
    }
    let mut fr2 = Fragment::new(Scheme::new(TypeSpec::binary()));
    'outer: for chain in 0..fr.blocks() {
        for (i, line) in fr.log_lines(chain).iter().enumerate() {
            if let Err(e) = fr2.replay_line(line) {
                println!("!!! chain {chain} line {i} failed: {e}");
                println!("    line: {line}");
                println!(
                    "    fr2 strongest: {:?}",
                    fr2.log_lines(chain).last()
                );
                break 'outer;
            }
        }
    }
}
