package org.example.math;

public class TestVector {
    private final double x;
    private final double y;

    public TestVector(double x, double y) {
        this.x = x;
        this.y = y;
    }

    public TestVector scale(double factor) {
        return new TestVector(x * factor, y * factor);
    }

    public double magnitude() {
        return Math.sqrt(x * x + y * y);
    }
}
