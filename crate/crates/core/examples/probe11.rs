fn main() {
    use cartanpts::enumeration::*;
    use cartanpts::*;
    let prec = precision::Prec::new(512).unwrap();
    let ctx = geometry::GroupContext::build(11, &geometry::HSpec::PmOne).unwrap();
    let units = cyclo::UnitSystem::build(&ctx, None).unwrap();
    let emb = cyclo::Embedder::new(11, prec);
    let ulm = relation::UnitLogMatrix::build(&ctx, &units, &emb).unwrap();
    let orbits = ctx.unit_orbits();
    let nu = pipeline::choose_nu(11, ulm.kappa.value().to_f64() * 2.0 * 12.0 * 2.0, 1e-10);
    let js = jinv::JSeries::new(256);
    let frame = relation::CuspFrame::build(&ctx, &orbits, &ulm, 4, nu, &emb).unwrap();
    let pieces = split_domain(&frame, 124.83108557603767, 512, prec).unwrap();
    let piece = &pieces[1];
    println!(
        "piece1 [{:e}, {:e}] f [{}, {}] inc {}",
        piece.lo.value().to_f64(),
        piece.hi.value().to_f64(),
        piece.f_lo.value().to_f64(),
        piece.f_hi.value().to_f64(),
        piece.increasing
    );
    match process_b1(&frame, piece, -2, 1, prec).unwrap() {
        B1Outcome::Survivor {
            t_lo,
            t_hi,
            b_vector,
            ..
        } => {
            println!(
                "survivor b {:?} t_lo {:e} t_hi {:e} width {:e}",
                b_vector,
                t_lo.value().to_f64(),
                t_hi.value().to_f64(),
                t_hi.sub(&t_lo).value().to_f64()
            );
            println!(
                "t_lo err {:e} t_hi err {:e}",
                t_lo.err().to_f64(),
                t_hi.err().to_f64()
            );
            match classify_interval(&js, &t_lo, &t_hi, 11, prec) {
                Ok((j, c)) => println!(
                    "j {:e} err {:e} {:?}",
                    j.value().to_f64(),
                    j.err().to_f64(),
                    c
                ),
                Err(e) => println!("classify error: {e}"),
            }
        }
        B1Outcome::Pruned(st) => println!("pruned {st:?}"),
    }
}
