package org.example.bench;

public class SpeedTest {
    public long measure(Runnable workload, int rounds) {
        long start = System.nanoTime();
        for (int i = 0; i < rounds; i++) {
            workload.run();
        }
        return System.nanoTime() - start;
    }

    public static void main(String[] args) {
        System.out.println(new SpeedTest().measure(() -> { }, 1000));
    }
}
