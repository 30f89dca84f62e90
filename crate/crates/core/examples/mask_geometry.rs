// Masks to polygons, then the distance and overlap features between objects.

use std::collections::{BTreeMap, BTreeSet};
use std::error::Error;

use surgctx::context::{compute_features, FeatureKey};
use surgctx::geometry::{mask_to_polygons, object_distance};
use surgctx::trial_io::{Mask, ObjectClass};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut grasper = Mask::empty(120, 80, ObjectClass::LeftGrasper, 0);
    grasper.fill_rect(10, 10, 50, 30);
    let mut needle = Mask::empty(120, 80, ObjectClass::Needle, 0);
    needle.fill_rect(50, 20, 90, 26);
    let mut thread = Mask::empty(120, 80, ObjectClass::Thread, 0);
    thread.fill_rect(100, 60, 115, 75);

    let objects: BTreeMap<ObjectClass, _> = [grasper, needle, thread]
        .iter()
        .map(|m| (m.object_class, mask_to_polygons(m, 1.5, 15.0)))
        .collect();
    for (class, p) in &objects {
        println!("{}: {} component(s), {:.0} px^2", class.symbol(), p.components.len(), p.area());
    }

    let lg_n = object_distance(&objects[&ObjectClass::LeftGrasper], &objects[&ObjectClass::Needle]);
    println!("D(LG,N) = {lg_n:.2}");
    assert_eq!(lg_n, 0.0, "adjacent pixel blocks share a boundary");

    let keys: BTreeSet<FeatureKey> = [
        FeatureKey::Distance(ObjectClass::Needle, ObjectClass::Thread),
        FeatureKey::Intersection(ObjectClass::LeftGrasper, ObjectClass::Needle),
        FeatureKey::Distance(ObjectClass::RightGrasper, ObjectClass::Needle),
    ]
    .into();
    let v = compute_features(0, &objects, true, true, &keys);
    for (k, value) in &v.values {
        println!("{k:?} = {value}");
    }
    // The right grasper has no mask, so its distances are infinite.
    assert!(v.values[&FeatureKey::Distance(ObjectClass::RightGrasper, ObjectClass::Needle)].is_infinite());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
