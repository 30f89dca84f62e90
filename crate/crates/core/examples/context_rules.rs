// Writing a custom rule set and evaluating it on a feature vector.

use std::error::Error;

use surgctx::context::{infer_state, FeatureKey, FeatureVector, RuleSet, Thresholds};
use surgctx::trial_io::{ObjectClass, StateVariable};

const RULES: &str = "\
task = Suturing

[left_hold]
2: D(LG,N) < near and closed(LG)

[right_contact]
3: Inter(RG,T) > overlap and open(RG)
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let rules = RuleSet::parse(RULES, "inline")?;
    print!("{}", rules.to_text());

    let mut v = FeatureVector::default()
        .with(FeatureKey::Distance(ObjectClass::LeftGrasper, ObjectClass::Needle), 0.0)
        .with(FeatureKey::Intersection(ObjectClass::RightGrasper, ObjectClass::Thread), 42.0);
    v.alpha_left = false;
    v.alpha_right = true;

    let state = infer_state(&v, &rules, &Thresholds::default());
    println!("context {}", state.code());
    assert_eq!(state.get(StateVariable::LeftHold), 2);
    assert_eq!(state.get(StateVariable::RightContact), 3);

    // The built-in rules need more features; missing ones count as absent.
    let builtin = infer_state(&v, &RuleSet::builtin(rules.task), &Thresholds::default());
    println!("built-in rules give {}", builtin.code());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
