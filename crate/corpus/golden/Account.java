public class Account {

    //@ public ghost Account temp;

    public /*@ pure @*/ int balance() {
        // TODO: implement
        return 0;
    }

    //@ ensures balance() == 0;
    public Account() {
        // TODO: implement
    }

    //@ ensures (this.balance() == another.balance()) ==> (\result == true);
    public boolean equals(Account another) {
        // TODO: implement
        return false;
    }

    //@ requires another != null;
    //@ ensures (this.balance() == another.balance()) && (this != another);
    public Account(Account another) {
        // TODO: implement
    }

    /*@ requires this.balance() + x >= 0;
      @ ensures (\result.balance() == x + temp.balance()) && (\result == this);
      @ also
      @ requires this.balance() + x < 0;
      @ ensures \result == this;
      @ assignable \nothing;
      @*/
    public Account add(int x) {
        //@ set temp = new Account(this);
        // TODO: implement
        return this;
    }
}
