package org.example.rig;

public abstract class TestBed {
    protected abstract void prepare();

    public void execute(Runnable workload) {
        prepare();
        workload.run();
    }
}
