use dendrolog::notation::*;
use dendrolog::oracle::{index, decode};
use dendrolog::pairing::nat;
use std::time::Instant;

fn main() {
    let idc = id_code();
    let t0 = Instant::now();
    let idx = index(&idc);
    println!("index(id_code): {:?}, bits={}", t0.elapsed(), idx.bits());
    let s = sup(&nat(3), &idx);
    println!("sup bits = {}", s.bits());
    let t1 = Instant::now();
    let v = view(&s);
    println!("view: {:?}", t1.elapsed());
    match v { View::Sup(_, b) => {
        let t2 = Instant::now();
        let d = decode(&b);
        println!("decode(b): {:?} ok={}", t2.elapsed(), d.is_some());
    }, _ => {} }
    let cc = const_checked(&nat(5));
    let ci = index(&cc);
    println!("const_checked bits = {}", ci.bits());
    let s2 = sup(&nat(0), &ci);
    let t3 = Instant::now();
    let _ = view(&s2);
    println!("view(s2): {:?}", t3.elapsed());
}
