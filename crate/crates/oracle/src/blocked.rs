//! Whether a channel can refuse its event, decided by searching the
//! channeled behavior directly.

use std::collections::{HashMap, VecDeque};

use dsc_core::robustness::ChannelSpec;
use dsc_core::Event;

use crate::robust::{Channeled, Joint};

/// `s·r` is refused by the channel of `target` alone: every controller
/// and every other channel accepts it.
fn refused_only_by_target(sys: &Channeled, k: usize, state: &Joint) -> bool {
    let r = sys.channels[k].event;
    let (qs, busy) = state;
    sys.step_controllers(qs, r).is_some()
        && busy
            .iter()
            .enumerate()
            .all(|(j, &b)| j == k || sys.step_channel(j, b, r).is_some())
        && sys.step_channel(k, busy[k], r).is_none()
}

/// Shortest `s·r` with `s` in the channeled behavior such that the
/// controllers and the other channels accept `s·r` but the channel of
/// `target` does not.
pub fn blocked_witness(sys: &Channeled, target: &ChannelSpec) -> Option<Vec<Event>> {
    let k = sys.channels.iter().position(|c| c == target)?;
    let events: Vec<Event> = sys.events().into_iter().collect();
    let start = sys.initial()?;
    let mut parent: HashMap<Joint, Option<(Joint, Event)>> = HashMap::from([(start.clone(), None)]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        if refused_only_by_target(sys, k, &x) {
            let mut s = vec![target.event];
            let mut cur = x;
            while let Some(Some((p, e))) = parent.get(&cur).cloned() {
                s.push(e);
                cur = p;
            }
            s.reverse();
            return Some(s);
        }
        for &e in &events {
            if let Some(y) = sys.step(&x, e) {
                if !parent.contains_key(&y) {
                    parent.insert(y.clone(), Some((x.clone(), e)));
                    queue.push_back(y);
                }
            }
        }
    }
    None
}

/// `w = s·r` satisfies the blocking condition for `target`.
pub fn is_blocking_witness(sys: &Channeled, target: &ChannelSpec, w: &[Event]) -> bool {
    let Some(k) = sys.channels.iter().position(|c| c == target) else {
        return false;
    };
    let Some((&r, s)) = w.split_last() else {
        return false;
    };
    if r != target.event {
        return false;
    }
    let mut x = match sys.initial() {
        Some(x) => x,
        None => return false,
    };
    for &e in s {
        match sys.step(&x, e) {
            Some(y) => x = y,
            None => return false,
        }
    }
    refused_only_by_target(sys, k, &x)
}
